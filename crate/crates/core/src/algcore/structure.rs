use rand::seq::SliceRandom;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::hom::{hom_space, HomSpace, ModMap};
use super::module::FModule;
use super::Budget;
use crate::error::{Error, Result};
use crate::exactlin::{preimage, RMatrix, Subgroup};

#[derive(Clone, Debug)]
pub enum IsoOutcome {
    Iso(ModMap),
    NotIso,
    /// Search budget exhausted without a witness.
    Unknown,
}

impl IsoOutcome {
    pub fn is_iso(&self) -> bool {
        matches!(self, IsoOutcome::Iso(_))
    }
}

fn image_order(hs: &HomSpace, key: &[u64]) -> u32 {
    let rows: Vec<Vec<u64>> = key.chunks(hs.g_tgt.max(1)).map(|c| c.to_vec()).collect();
    if hs.g_tgt == 0 {
        return 0;
    }
    Subgroup::from_rows(hs.sub.ring(), hs.g_tgt, rows).order_log()
}

pub fn iso_test(m: &FModule, n: &FModule, budget: &Budget) -> Result<IsoOutcome> {
    m.same_algebra(n)?;
    if m.order_log() != n.order_log() {
        return Ok(IsoOutcome::NotIso);
    }
    let zero_m = Subgroup::zero(m.ring(), m.ambient());
    let zero_n = Subgroup::zero(n.ring(), n.ambient());
    if m.carrier().quotient_invariants(&zero_m)? != n.carrier().quotient_invariants(&zero_n)? {
        return Ok(IsoOutcome::NotIso);
    }
    if m.is_zero() {
        return Ok(IsoOutcome::Iso(ModMap::new(m.clone(), n.clone(), RMatrix::zeros(m.ring(), m.ambient(), n.ambient()))?));
    }
    let hs = hom_space(m, n)?;
    let target = m.order_log();
    let witness = |key: &[u64], x: RMatrix| -> Result<IsoOutcome> {
        let _ = key;
        Ok(IsoOutcome::Iso(ModMap::new(m.clone(), n.clone(), x)?))
    };
    match hs.count() {
        Some(c) if (c as u128) <= budget.limit => {
            let found = crate::par::find_index(c, |i| {
                !budget.cancelled() && image_order(&hs, &hs.element(i).0) == target
            });
            budget.check_cancel()?;
            match found {
                Some(i) => {
                    let (k, x) = hs.element(i);
                    witness(&k, x)
                }
                None => Ok(IsoOutcome::NotIso),
            }
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            let ring = hs.sub.ring();
            for _ in 0..budget.random_samples {
                budget.check_cancel()?;
                let c: Vec<u64> = hs.sub.rows().iter().map(|_| rng.gen_range(0..ring.modulus())).collect();
                let (k, x) = hs.combine(&c);
                if image_order(&hs, &k) == target {
                    return witness(&k, x);
                }
            }
            Ok(IsoOutcome::Unknown)
        }
    }
}

/// True iff End(M) has no idempotent besides 0 and 1; the zero module is not indecomposable.
pub fn is_indecomposable(m: &FModule, budget: &Budget) -> Result<bool> {
    if m.is_zero() {
        return Ok(false);
    }
    let hs = hom_space(m, m)?;
    let count = hs
        .count()
        .filter(|&c| (c as u128) <= budget.limit)
        .ok_or_else(|| Error::Budget(format!("End has p^{} elements", hs.order_log())))?;
    let id_key = hs.key(&RMatrix::identity(m.ring(), m.ambient()));
    let found = crate::par::find_index(count, |i| {
        if budget.cancelled() {
            return false;
        }
        let (k, x) = hs.element(i);
        if k.iter().all(|&v| v == 0) || k == id_key {
            return false;
        }
        let sq = x.mul(&x).expect("square");
        hs.key(&sq) == k
    });
    budget.check_cancel()?;
    Ok(found.is_none())
}

/// End-submodule generated by a subgroup: Σ_f f(S) over additive generators of End.
fn end_closure(exts: &[RMatrix], s_rows: &[Vec<u64>], ring: crate::exactlin::Ring, g: usize) -> Subgroup {
    let mut rows: Vec<Vec<u64>> = s_rows.to_vec();
    for x in exts {
        for r in s_rows {
            rows.push(x.apply(r));
        }
    }
    Subgroup::from_rows(ring, g, rows)
}

/// A composition series of M over End(M), from 0 to M. With a seed, candidates are
/// visited in shuffled order (the length does not depend on it).
pub fn composition_series(m: &FModule, seed: Option<u64>, budget: &Budget) -> Result<Vec<Subgroup>> {
    let ring = m.ring();
    let g = m.ambient();
    let hs = hom_space(m, m)?;
    let mut w = Subgroup::zero(ring, g);
    let mut chain = vec![w.clone()];
    let p_times = RMatrix::scalar(ring, g, ring.p());
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    while w != *m.carrier() {
        budget.check_cancel()?;
        // simple End-subquotients are killed by p
        let cand = preimage(&p_times, &w)?.intersect(m.carrier())?;
        if (ring.p() as u128).pow(cand.order_log()) > budget.limit {
            return Err(Error::Budget(format!("candidate layer of p^{} elements", cand.order_log())));
        }
        let mut reps: Vec<Vec<u64>> = cand.sorted_elements().into_iter().map(|x| w.reduce(&x)).collect();
        reps.sort();
        reps.dedup();
        reps.retain(|x| x.iter().any(|&v| v != 0));
        if let Some(r) = rng.as_mut() {
            reps.shuffle(r);
        }
        let mut best: Option<Subgroup> = None;
        for x in reps {
            let mut rows = w.rows().to_vec();
            rows.push(x);
            let c = end_closure(&hs.ext, &rows, ring, g);
            let better = match &best {
                None => true,
                Some(b) => c.order_log() < b.order_log() || (seed.is_none() && c.order_log() == b.order_log() && c.rows() < b.rows()),
            };
            if better {
                best = Some(c);
            }
        }
        w = best.ok_or_else(|| Error::Invalid("no candidate above a proper submodule".into()))?;
        chain.push(w.clone());
    }
    Ok(chain)
}

pub fn endolength(m: &FModule, budget: &Budget) -> Result<usize> {
    Ok(composition_series(m, None, budget)?.len() - 1)
}

/// All End(M)-invariant subgroups of M, sorted by order then basis.
pub fn end_submodules(m: &FModule, budget: &Budget) -> Result<Vec<Subgroup>> {
    let ring = m.ring();
    let g = m.ambient();
    budget.check_size(ring.p(), m.order_log(), "module")?;
    let hs = hom_space(m, m)?;
    let mut cyclic: Vec<Subgroup> = m
        .elements()
        .into_iter()
        .map(|x| end_closure(&hs.ext, &[x], ring, g))
        .collect();
    cyclic.sort_by(|a, b| (a.order_log(), a.rows()).cmp(&(b.order_log(), b.rows())));
    cyclic.dedup();
    let mut all: Vec<Subgroup> = vec![Subgroup::zero(ring, g)];
    let mut seen: std::collections::HashSet<Subgroup> = all.iter().cloned().collect();
    let mut frontier = all.clone();
    while let Some(s) = frontier.pop() {
        budget.check_cancel()?;
        for c in &cyclic {
            let t = s.sum(c)?;
            if seen.insert(t.clone()) {
                if seen.len() as u128 > budget.limit {
                    return Err(Error::Budget("too many submodules".into()));
                }
                all.push(t.clone());
                frontier.push(t);
            }
        }
    }
    all.sort_by(|a, b| (a.order_log(), a.rows()).cmp(&(b.order_log(), b.rows())));
    Ok(all)
}
