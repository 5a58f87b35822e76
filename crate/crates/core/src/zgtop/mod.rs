//! A combinatorial model of the torsion-free part of the Ziegler spectrum of a tame
//! Bäckström order: lattice points in tubes, Prüfer and adic points, generics and
//! divisible points, with the closure operator described by four rules.
//!
//! Adic points are carried as opaque labels; no module is attached to them.

mod space;

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub use space::{Exceptional, Point, TameZgSpace, Tube, ZgSubset};

fn check_within(space: &TameZgSpace, c: &ZgSubset) -> Result<()> {
    match c.points().into_iter().find(|p| !space.contains_point(p)) {
        Some(p) => Err(Error::Invalid(format!("point {p} is not in the space"))),
        None => Ok(()),
    }
}

/// Rules (1)–(3): Prüfer and adic points of a tube with infinitely many lattice
/// points (subject to the hom predicates), and G_i when type i has infinitely
/// many lattice points or a Prüfer or adic point.
fn reduced_rules(space: &TameZgSpace, c: &mut ZgSubset) -> bool {
    let before = c.clone();
    for t in space.tubes() {
        if c.infinite_in(t) {
            for q in &t.quasi_simples {
                if space.hom_to(q) {
                    c.prufer.insert(q.clone());
                }
                if space.hom_from(q) {
                    c.adic.insert(q.clone());
                }
            }
        }
    }
    for t in space.tubes() {
        let limit = t.quasi_simples.iter().any(|q| c.prufer.contains(q) || c.adic.contains(q));
        if c.infinite_in(t) || limit {
            c.generics.insert(t.typ);
        }
    }
    *c != before
}

/// Rule (4): divisible summands of NQ for every N in the set.
fn hull_rule(space: &TameZgSpace, c: &mut ZgSubset) -> bool {
    let add: BTreeSet<String> = c.points().iter().flat_map(|p| space.rational_hull(p)).collect();
    let n = c.divisibles.len();
    c.divisibles.extend(add);
    c.divisibles.len() != n
}

/// The least closed superset.
pub fn closure(space: &TameZgSpace, c: &ZgSubset) -> Result<ZgSubset> {
    check_within(space, c)?;
    let mut out = c.clone();
    out.normalize();
    loop {
        let a = reduced_rules(space, &mut out);
        let b = hull_rule(space, &mut out);
        if !a && !b {
            return Ok(out);
        }
    }
}

pub fn is_closed(space: &TameZgSpace, c: &ZgSubset) -> Result<bool> {
    let mut n = c.clone();
    n.normalize();
    Ok(closure(space, c)? == n)
}

/// 𝒱(S): the points N with S | NQ, together with S.
pub fn v_set(space: &TameZgSpace, s: &str) -> Result<ZgSubset> {
    if !space.divisibles().contains(s) {
        return Err(Error::Invalid(format!("'{s}' is not a divisible point")));
    }
    let mut out = ZgSubset::default();
    for t in space.tubes().iter().filter(|t| t.hull.contains(s)) {
        for q in &t.quasi_simples {
            out.cofinite.insert(q.clone(), 1);
            out.prufer.insert(q.clone());
            out.adic.insert(q.clone());
        }
    }
    for x in space.exceptional().iter().filter(|x| x.hull.contains(s)) {
        out.exceptional.insert(x.label.clone());
    }
    out.generics = (1..=space.types()).filter(|&i| space.generic_hull(i).contains(s)).collect();
    out.divisibles.insert(s.to_string());
    Ok(out)
}

/// U = (U ∩ reduced points) ∪ ⋃_{S ∈ λ(U)} 𝒱(S) for an open set U.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenDecomposition {
    pub reduced_part: ZgSubset,
    pub hulls: Vec<(String, ZgSubset)>,
}

impl OpenDecomposition {
    pub fn reassemble(&self) -> ZgSubset {
        self.hulls.iter().fold(self.reduced_part.clone(), |acc, (_, v)| acc.union(v))
    }
}

pub fn open_basis_decomposition(space: &TameZgSpace, u: &ZgSubset) -> Result<OpenDecomposition> {
    check_within(space, u)?;
    if !is_closed(space, &u.complement(space))? {
        return Err(Error::Invalid("the set is not open".into()));
    }
    let hulls = u.divisibles.iter().map(|s| Ok((s.clone(), v_set(space, s)?))).collect::<Result<_>>()?;
    Ok(OpenDecomposition { reduced_part: u.reduced_part(), hulls })
}

/// V̄ for a set V of reduced points closed under rules (1)–(3): V together with the
/// divisible summands of NQ for N ∈ V.
pub fn bar_v(space: &TameZgSpace, v: &ZgSubset) -> Result<ZgSubset> {
    check_within(space, v)?;
    if !v.divisibles.is_empty() {
        return Err(Error::Invalid("V must consist of reduced points".into()));
    }
    let mut w = v.clone();
    w.normalize();
    if reduced_rules(space, &mut w.clone()) {
        return Err(Error::Invalid("V is not closed on the reduced side".into()));
    }
    hull_rule(space, &mut w);
    Ok(w)
}

/// Whether p is isolated in Y: p is not in the closure of Y \ {p}. Lattice points
/// are never added by the closure rules, and all levels of a quasi-simple behave
/// alike, so one representative decides a whole family.
fn isolated_in(space: &TameZgSpace, y: &ZgSubset, p: &Point) -> Result<bool> {
    let rest = y.difference(&ZgSubset::from_points([p.clone()]), space);
    Ok(!closure(space, &rest)?.contains(p))
}

/// Cantor–Bendixson analysis by iterated removal of isolated points: for each
/// point family (one representative per quasi-simple), its rank, or `None` if it
/// lies in the perfect kernel.
pub fn cb_ranks(space: &TameZgSpace) -> Result<Vec<(Point, Option<u32>)>> {
    let mut y = space.universe();
    let mut out: Vec<(Point, Option<u32>)> = Vec::new();
    let mut level = 0;
    while !y.is_empty() {
        let reps = y.points();
        let mut iso = Vec::new();
        for p in reps {
            if isolated_in(space, &y, &p)? {
                iso.push(p);
            }
        }
        if iso.is_empty() {
            break;
        }
        for p in iso {
            match &p {
                Point::Lattice(e, _) => {
                    y.cofinite.remove(e);
                    y.lattice.retain(|(f, _)| f != e);
                    out.push((Point::Lattice(e.clone(), 1), Some(level)));
                }
                _ => {
                    y = y.difference(&ZgSubset::from_points([p.clone()]), space);
                    out.push((p, Some(level)));
                }
            }
        }
        level += 1;
    }
    out.extend(y.points().into_iter().map(|p| (p, None)));
    out.sort();
    Ok(out)
}

pub fn cb_rank(space: &TameZgSpace, point: &Point) -> Result<Option<u32>> {
    if !space.contains_point(point) {
        return Err(Error::Invalid(format!("point {point} is not in the space")));
    }
    let key = match point {
        Point::Lattice(e, _) => Point::Lattice(e.clone(), 1),
        p => p.clone(),
    };
    Ok(cb_ranks(space)?.into_iter().find(|(p, _)| *p == key).and_then(|(_, r)| r))
}

/// The expected ranks where they are determined by the shape of the space: lattice
/// points 0, Prüfer and adic points 1, generics 2 and divisible summands of a
/// generic's NQ 3. Limit points need a true hom predicate to be reachable from
/// their tube, and a generic needs a reachable limit point of its type.
pub fn cb_rank_table(space: &TameZgSpace, point: &Point) -> Option<u32> {
    let reachable = |i: usize| {
        space
            .tubes()
            .iter()
            .filter(|t| t.typ == i)
            .flat_map(|t| t.quasi_simples.iter())
            .any(|q| space.hom_to(q) || space.hom_from(q))
    };
    match point {
        Point::Lattice(..) | Point::Exceptional(_) => Some(0),
        Point::Prufer(e) => space.hom_to(e).then_some(1),
        Point::Adic(e) => space.hom_from(e).then_some(1),
        Point::Generic(i) => reachable(*i).then_some(2),
        Point::Divisible(s) => {
            (1..=space.types()).any(|i| reachable(i) && space.generic_hull(i).contains(s)).then_some(3)
        }
    }
}

/// A random toy space with up to `max_tubes` tubes of rank at most `max_rank`.
pub fn toy_space(seed: u64, max_tubes: usize, max_rank: usize) -> TameZgSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ntubes = rng.gen_range(1..=max_tubes.max(1));
    let types = rng.gen_range(1..=ntubes.min(2));
    let ndiv = rng.gen_range(types + 1..=types + 2);
    let divs: Vec<String> = (0..ndiv).map(|i| format!("S{i}")).collect();
    // divisible i < types belongs to G(i + 1); the rest are spread over tubes and exceptionals
    let generic_hull: Vec<BTreeSet<String>> = (0..types).map(|i| BTreeSet::from([divs[i].clone()])).collect();
    let mut tubes = Vec::new();
    let (mut hom_to, mut hom_from) = (BTreeSet::new(), BTreeSet::new());
    for t in 0..ntubes {
        let typ = if t < types { t + 1 } else { rng.gen_range(1..=types) };
        let rank = rng.gen_range(1..=max_rank.max(1));
        let qs: Vec<String> = (0..rank).map(|j| format!("E{t}_{j}")).collect();
        for q in &qs {
            if rng.gen_bool(0.8) {
                hom_to.insert(q.clone());
            }
            if rng.gen_bool(0.8) {
                hom_from.insert(q.clone());
            }
        }
        let mut hull = generic_hull[typ - 1].clone();
        if rng.gen_bool(0.5) {
            hull.insert(divs[rng.gen_range(0..ndiv)].clone());
        }
        tubes.push(Tube { name: format!("T{t}"), typ, quasi_simples: qs, hull });
    }
    let nexc = rng.gen_range(0..=2);
    let exceptional = (0..nexc)
        .map(|x| Exceptional {
            label: format!("P{x}"),
            typ: if rng.gen_bool(0.5) { None } else { Some(rng.gen_range(1..=types)) },
            hull: BTreeSet::from([divs[rng.gen_range(0..ndiv)].clone()]),
        })
        .collect();
    TameZgSpace::new(types, tubes, exceptional, hom_to, hom_from, divs.into_iter().collect(), generic_hull)
        .expect("toy space is valid")
}

/// A random subset of a space, using levels up to `max_level`.
pub fn random_subset(space: &TameZgSpace, seed: u64, max_level: u32) -> ZgSubset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = ZgSubset::default();
    for q in space.quasi_simples() {
        for l in 1..=max_level {
            if rng.gen_bool(0.2) {
                s.lattice.insert((q.clone(), l));
            }
        }
        if rng.gen_bool(0.25) {
            s.cofinite.insert(q.clone(), rng.gen_range(1..=max_level));
        }
        if rng.gen_bool(0.15) {
            s.prufer.insert(q.clone());
        }
        if rng.gen_bool(0.15) {
            s.adic.insert(q.clone());
        }
    }
    for x in space.exceptional() {
        if rng.gen_bool(0.3) {
            s.exceptional.insert(x.label.clone());
        }
    }
    for i in 1..=space.types() {
        if rng.gen_bool(0.15) {
            s.generics.insert(i);
        }
    }
    for d in space.divisibles() {
        if rng.gen_bool(0.2) {
            s.divisibles.insert(d.clone());
        }
    }
    s.normalize();
    s
}
