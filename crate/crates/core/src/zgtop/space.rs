use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// A tube of the Auslander–Reiten quiver of the hereditary side, given as data.
/// Its rank is the number of quasi-simples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tube {
    pub name: String,
    pub typ: usize,
    pub quasi_simples: Vec<String>,
    /// Divisible points S with S | NQ for every lattice point N of the tube and its limits.
    pub hull: BTreeSet<String>,
}

impl Tube {
    pub fn rank(&self) -> usize {
        self.quasi_simples.len()
    }
}

/// A lattice point outside the tubes (preprojective or preinjective image, or a
/// lattice of the finite-type component when `typ` is `None`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exceptional {
    pub label: String,
    pub typ: Option<usize>,
    pub hull: BTreeSet<String>,
}

/// Symbolic torsion-free part of the Ziegler spectrum of a tame Bäckström order:
/// types 1..=n of infinite lattice type plus a finite-type component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TameZgSpace {
    types: usize,
    tubes: Vec<Tube>,
    exceptional: Vec<Exceptional>,
    hom_to: BTreeSet<String>,
    hom_from: BTreeSet<String>,
    divisibles: BTreeSet<String>,
    generic_hull: Vec<BTreeSet<String>>,
    qs_tube: BTreeMap<String, usize>,
}

/// A point of the space.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    /// E[ℓ] for a quasi-simple E and level ℓ ≥ 1.
    Lattice(String, u32),
    Exceptional(String),
    /// E[∞].
    Prufer(String),
    /// Ê.
    Adic(String),
    /// G_i.
    Generic(usize),
    Divisible(String),
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Lattice(e, l) => write!(f, "{e}[{l}]"),
            Point::Exceptional(s) | Point::Divisible(s) => write!(f, "{s}"),
            Point::Prufer(e) => write!(f, "{e}[inf]"),
            Point::Adic(e) => write!(f, "{e}^"),
            Point::Generic(i) => write!(f, "G({i})"),
        }
    }
}

fn valid_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'') && !s.starts_with("G(")
}

impl TameZgSpace {
    pub fn new(
        types: usize,
        tubes: Vec<Tube>,
        exceptional: Vec<Exceptional>,
        hom_to: BTreeSet<String>,
        hom_from: BTreeSet<String>,
        divisibles: BTreeSet<String>,
        generic_hull: Vec<BTreeSet<String>>,
    ) -> Result<TameZgSpace> {
        let bad = |m: String| Err(Error::Invalid(m));
        if generic_hull.len() != types {
            return bad(format!("{types} types need {types} generic hulls"));
        }
        let mut labels = BTreeSet::new();
        let mut qs_tube = BTreeMap::new();
        let all_labels = tubes
            .iter()
            .flat_map(|t| t.quasi_simples.iter().chain([&t.name]))
            .chain(exceptional.iter().map(|e| &e.label))
            .chain(divisibles.iter());
        for l in all_labels {
            if !valid_label(l) {
                return bad(format!("invalid label '{l}'"));
            }
            if !labels.insert(l.clone()) {
                return bad(format!("label '{l}' used twice"));
            }
        }
        let hull_ok = |h: &BTreeSet<String>| !h.is_empty() && h.is_subset(&divisibles);
        for (ti, t) in tubes.iter().enumerate() {
            if t.typ == 0 || t.typ > types {
                return bad(format!("tube {} has type {} outside 1..={types}", t.name, t.typ));
            }
            if t.quasi_simples.is_empty() {
                return bad(format!("tube {} has rank 0", t.name));
            }
            if !hull_ok(&t.hull) {
                return bad(format!("tube {} needs a nonempty hull of known divisibles", t.name));
            }
            if !generic_hull[t.typ - 1].is_subset(&t.hull) {
                return bad(format!("the hull of G({}) must lie in the hull of tube {}", t.typ, t.name));
            }
            for q in &t.quasi_simples {
                qs_tube.insert(q.clone(), ti);
            }
        }
        for i in 1..=types {
            if !tubes.iter().any(|t| t.typ == i) {
                return bad(format!("type {i} has no tube"));
            }
            if !hull_ok(&generic_hull[i - 1]) {
                return bad(format!("G({i}) needs a nonempty hull of known divisibles"));
            }
        }
        for e in &exceptional {
            if e.typ.is_some_and(|t| t == 0 || t > types) {
                return bad(format!("exceptional {} has an unknown type", e.label));
            }
            if !hull_ok(&e.hull) {
                return bad(format!("exceptional {} needs a nonempty hull of known divisibles", e.label));
            }
        }
        for q in hom_to.iter().chain(&hom_from) {
            if !qs_tube.contains_key(q) {
                return bad(format!("'{q}' is not a quasi-simple"));
            }
        }
        Ok(TameZgSpace { types, tubes, exceptional, hom_to, hom_from, divisibles, generic_hull, qs_tube })
    }

    pub fn types(&self) -> usize {
        self.types
    }
    pub fn tubes(&self) -> &[Tube] {
        &self.tubes
    }
    pub fn exceptional(&self) -> &[Exceptional] {
        &self.exceptional
    }
    pub fn divisibles(&self) -> &BTreeSet<String> {
        &self.divisibles
    }
    pub fn hom_to(&self, q: &str) -> bool {
        self.hom_to.contains(q)
    }
    pub fn hom_from(&self, q: &str) -> bool {
        self.hom_from.contains(q)
    }
    pub fn generic_hull(&self, i: usize) -> &BTreeSet<String> {
        &self.generic_hull[i - 1]
    }

    pub fn tube_of(&self, q: &str) -> Option<&Tube> {
        self.qs_tube.get(q).map(|&t| &self.tubes[t])
    }

    pub fn quasi_simples(&self) -> impl Iterator<Item = &String> {
        self.tubes.iter().flat_map(|t| t.quasi_simples.iter())
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        match p {
            Point::Lattice(e, l) => *l >= 1 && self.qs_tube.contains_key(e),
            Point::Prufer(e) | Point::Adic(e) => self.qs_tube.contains_key(e),
            Point::Exceptional(s) => self.exceptional.iter().any(|x| &x.label == s),
            Point::Generic(i) => (1..=self.types).contains(i),
            Point::Divisible(s) => self.divisibles.contains(s),
        }
    }

    /// Divisible summands of NQ; empty for divisible points.
    pub fn rational_hull(&self, p: &Point) -> BTreeSet<String> {
        match p {
            Point::Lattice(e, _) | Point::Prufer(e) | Point::Adic(e) => {
                self.tube_of(e).map(|t| t.hull.clone()).unwrap_or_default()
            }
            Point::Exceptional(s) => {
                self.exceptional.iter().find(|x| &x.label == s).map(|x| x.hull.clone()).unwrap_or_default()
            }
            Point::Generic(i) => self.generic_hull.get(i.wrapping_sub(1)).cloned().unwrap_or_default(),
            Point::Divisible(_) => BTreeSet::new(),
        }
    }

    /// The whole space.
    pub fn universe(&self) -> ZgSubset {
        let mut s = ZgSubset::default();
        for q in self.quasi_simples() {
            s.cofinite.insert(q.clone(), 1);
            s.prufer.insert(q.clone());
            s.adic.insert(q.clone());
        }
        s.exceptional = self.exceptional.iter().map(|e| e.label.clone()).collect();
        s.generics = (1..=self.types).collect();
        s.divisibles = self.divisibles.clone();
        s
    }

    /// Parses a point, resolving bare labels against the space.
    pub fn parse_point(&self, text: &str) -> Result<Point> {
        let t = text.trim();
        let bad = || Error::Syntax { pos: 0, msg: format!("unknown point '{t}'") };
        let p = if let Some(inner) = t.strip_prefix("G(").and_then(|r| r.strip_suffix(')')) {
            Point::Generic(inner.parse().map_err(|_| bad())?)
        } else if let Some(e) = t.strip_suffix('^') {
            Point::Adic(e.to_string())
        } else if let Some((e, rest)) = t.split_once('[') {
            let lvl = rest.strip_suffix(']').ok_or_else(bad)?;
            if lvl == "inf" {
                Point::Prufer(e.to_string())
            } else {
                Point::Lattice(e.to_string(), lvl.parse().map_err(|_| bad())?)
            }
        } else if self.divisibles.contains(t) {
            Point::Divisible(t.to_string())
        } else {
            Point::Exceptional(t.to_string())
        };
        if self.contains_point(&p) {
            Ok(p)
        } else {
            Err(bad())
        }
    }

    /// Parses a subset: points separated by commas or spaces, with `E[k..]` for all
    /// levels from k on, optionally wrapped in braces.
    pub fn parse_subset(&self, text: &str) -> Result<ZgSubset> {
        let t = text.trim().trim_start_matches('{').trim_end_matches('}');
        let mut s = ZgSubset::default();
        for tok in t.split(|c: char| c == ',' || c.is_whitespace()).filter(|x| !x.is_empty()) {
            if let Some((e, rest)) = tok.split_once('[') {
                if let Some(from) = rest.strip_suffix("..]") {
                    let k: u32 = from.parse().map_err(|_| Error::Syntax { pos: 0, msg: format!("bad level in '{tok}'") })?;
                    if k == 0 || !self.qs_tube.contains_key(e) {
                        return Err(Error::Syntax { pos: 0, msg: format!("unknown point '{tok}'") });
                    }
                    s.add_from(e, k);
                    continue;
                }
            }
            s.insert(self.parse_point(tok)?);
        }
        s.normalize();
        Ok(s)
    }

    /// Line-oriented text form, read back by [`TameZgSpace::parse`].
    pub fn to_text(&self) -> String {
        let join = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(" ");
        let mut out = format!("types {}\n", self.types);
        for t in &self.tubes {
            out += &format!("tube {} type {} qs {} hull {}\n", t.name, t.typ, t.quasi_simples.join(" "), join(&t.hull));
        }
        for e in &self.exceptional {
            out += &format!("exceptional {} type {} hull {}\n", e.label, e.typ.unwrap_or(0), join(&e.hull));
        }
        for (i, h) in self.generic_hull.iter().enumerate() {
            out += &format!("generic {} hull {}\n", i + 1, join(h));
        }
        out += &format!("hom_to {}\n", join(&self.hom_to));
        out += &format!("hom_from {}\n", join(&self.hom_from));
        out += &format!("divisible {}\n", join(&self.divisibles));
        out
    }

    /// Reads the form written by [`TameZgSpace::to_text`]. Type 0 marks the finite-type component.
    pub fn parse(text: &str) -> Result<TameZgSpace> {
        let mut types = 0;
        let mut tubes = Vec::new();
        let mut exceptional = Vec::new();
        let mut generic: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
        let (mut hom_to, mut hom_from, mut divisibles) = (BTreeSet::new(), BTreeSet::new(), BTreeSet::new());
        for (ln, line) in text.lines().enumerate() {
            let err = |m: &str| Error::Syntax { pos: ln + 1, msg: m.to_string() };
            let toks: Vec<&str> = line.split('#').next().unwrap_or("").split_whitespace().collect();
            let Some((&head, rest)) = toks.split_first() else { continue };
            let section = |key: &str| -> Vec<String> {
                let start = rest.iter().position(|&t| t == key).map(|i| i + 1);
                start
                    .map(|s| {
                        rest[s..]
                            .iter()
                            .take_while(|t| !matches!(**t, "type" | "qs" | "hull"))
                            .map(|t| t.to_string())
                            .collect()
                    })
                    .unwrap_or_default()
            };
            let num = |key: &str| -> Result<usize> {
                section(key).first().and_then(|t| t.parse().ok()).ok_or_else(|| err(&format!("missing '{key} <n>'")))
            };
            match head {
                "types" => types = rest.first().and_then(|t| t.parse().ok()).ok_or_else(|| err("types <n>"))?,
                "tube" => tubes.push(Tube {
                    name: rest.first().ok_or_else(|| err("tube needs a name"))?.to_string(),
                    typ: num("type")?,
                    quasi_simples: section("qs"),
                    hull: section("hull").into_iter().collect(),
                }),
                "exceptional" => exceptional.push(Exceptional {
                    label: rest.first().ok_or_else(|| err("exceptional needs a label"))?.to_string(),
                    typ: Some(num("type")?).filter(|&t| t != 0),
                    hull: section("hull").into_iter().collect(),
                }),
                "generic" => {
                    let i: usize = rest.first().and_then(|t| t.parse().ok()).ok_or_else(|| err("generic <type>"))?;
                    generic.insert(i, section("hull").into_iter().collect());
                }
                "hom_to" => hom_to.extend(rest.iter().map(|t| t.to_string())),
                "hom_from" => hom_from.extend(rest.iter().map(|t| t.to_string())),
                "divisible" => divisibles.extend(rest.iter().map(|t| t.to_string())),
                other => return Err(err(&format!("unknown keyword '{other}'"))),
            }
        }
        let generic_hull = (1..=types).map(|i| generic.remove(&i).unwrap_or_default()).collect();
        TameZgSpace::new(types, tubes, exceptional, hom_to, hom_from, divisibles, generic_hull)
    }
}

/// A subset of the space: finitely many explicit points plus, per quasi-simple E,
/// an optional marker "all E[ℓ] with ℓ ≥ k".
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ZgSubset {
    pub lattice: BTreeSet<(String, u32)>,
    pub cofinite: BTreeMap<String, u32>,
    pub exceptional: BTreeSet<String>,
    pub prufer: BTreeSet<String>,
    pub adic: BTreeSet<String>,
    pub generics: BTreeSet<usize>,
    pub divisibles: BTreeSet<String>,
}

impl ZgSubset {
    pub fn empty() -> ZgSubset {
        ZgSubset::default()
    }

    pub fn from_points(points: impl IntoIterator<Item = Point>) -> ZgSubset {
        let mut s = ZgSubset::default();
        for p in points {
            s.insert(p);
        }
        s.normalize();
        s
    }

    pub fn insert(&mut self, p: Point) {
        match p {
            Point::Lattice(e, l) => {
                if self.cofinite.get(&e).is_none_or(|&k| l < k) {
                    self.lattice.insert((e, l));
                }
            }
            Point::Exceptional(s) => {
                self.exceptional.insert(s);
            }
            Point::Prufer(e) => {
                self.prufer.insert(e);
            }
            Point::Adic(e) => {
                self.adic.insert(e);
            }
            Point::Generic(i) => {
                self.generics.insert(i);
            }
            Point::Divisible(s) => {
                self.divisibles.insert(s);
            }
        }
    }

    /// Adds E[ℓ] for all ℓ ≥ k.
    pub fn add_from(&mut self, e: &str, k: u32) {
        let k = self.cofinite.get(e).map_or(k, |&old| old.min(k));
        self.cofinite.insert(e.to_string(), k);
        self.normalize();
    }

    /// Canonical form: explicit points are kept only below the marker, and a
    /// marker absorbs the explicit levels just below it.
    pub fn normalize(&mut self) {
        let markers: Vec<(String, u32)> = self.cofinite.iter().map(|(e, &k)| (e.clone(), k)).collect();
        for (e, mut k) in markers {
            while k > 1 && self.lattice.contains(&(e.clone(), k - 1)) {
                k -= 1;
            }
            self.lattice.retain(|(f, l)| f != &e || *l < k);
            self.cofinite.insert(e, k);
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Lattice(e, l) => self.lattice.contains(&(e.clone(), *l)) || self.cofinite.get(e).is_some_and(|&k| *l >= k),
            Point::Exceptional(s) => self.exceptional.contains(s),
            Point::Prufer(e) => self.prufer.contains(e),
            Point::Adic(e) => self.adic.contains(e),
            Point::Generic(i) => self.generics.contains(i),
            Point::Divisible(s) => self.divisibles.contains(s),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
            && self.cofinite.is_empty()
            && self.exceptional.is_empty()
            && self.prufer.is_empty()
            && self.adic.is_empty()
            && self.generics.is_empty()
            && self.divisibles.is_empty()
    }

    pub fn union(&self, o: &ZgSubset) -> ZgSubset {
        let mut s = self.clone();
        s.lattice.extend(o.lattice.iter().cloned());
        for (e, &k) in &o.cofinite {
            let k = s.cofinite.get(e).map_or(k, |&m| m.min(k));
            s.cofinite.insert(e.clone(), k);
        }
        s.exceptional.extend(o.exceptional.iter().cloned());
        s.prufer.extend(o.prufer.iter().cloned());
        s.adic.extend(o.adic.iter().cloned());
        s.generics.extend(o.generics.iter().copied());
        s.divisibles.extend(o.divisibles.iter().cloned());
        s.normalize();
        s
    }

    /// Explicit lattice levels of E below `upto`, with markers expanded.
    fn levels(&self, e: &str, upto: u32) -> BTreeSet<u32> {
        (1..upto).filter(|&l| self.contains(&Point::Lattice(e.to_string(), l))).collect()
    }

    pub fn intersection(&self, o: &ZgSubset) -> ZgSubset {
        let mut s = ZgSubset::default();
        let qs: BTreeSet<&String> = self
            .lattice
            .iter()
            .map(|(e, _)| e)
            .chain(self.cofinite.keys())
            .chain(o.lattice.iter().map(|(e, _)| e))
            .chain(o.cofinite.keys())
            .collect();
        for e in qs {
            let cut = match (self.cofinite.get(e), o.cofinite.get(e)) {
                (Some(&a), Some(&b)) => Some(a.max(b)),
                _ => None,
            };
            let bound = self.max_level(e).max(o.max_level(e)) + 1;
            for l in self.levels(e, bound).intersection(&o.levels(e, bound)) {
                s.lattice.insert((e.clone(), *l));
            }
            if let Some(k) = cut {
                s.cofinite.insert(e.clone(), k);
            }
        }
        s.exceptional = self.exceptional.intersection(&o.exceptional).cloned().collect();
        s.prufer = self.prufer.intersection(&o.prufer).cloned().collect();
        s.adic = self.adic.intersection(&o.adic).cloned().collect();
        s.generics = self.generics.intersection(&o.generics).copied().collect();
        s.divisibles = self.divisibles.intersection(&o.divisibles).cloned().collect();
        s.normalize();
        s
    }

    fn max_level(&self, e: &str) -> u32 {
        let explicit = self.lattice.iter().filter(|(f, _)| f == e).map(|(_, l)| *l).max().unwrap_or(0);
        explicit.max(self.cofinite.get(e).copied().unwrap_or(0))
    }

    /// Complement inside the space.
    pub fn complement(&self, space: &TameZgSpace) -> ZgSubset {
        let mut s = ZgSubset::default();
        for e in space.quasi_simples() {
            let top = self.max_level(e) + 1;
            for l in 1..top {
                if !self.contains(&Point::Lattice(e.clone(), l)) {
                    s.lattice.insert((e.clone(), l));
                }
            }
            if !self.cofinite.contains_key(e) {
                s.cofinite.insert(e.clone(), top);
            }
            if !self.prufer.contains(e) {
                s.prufer.insert(e.clone());
            }
            if !self.adic.contains(e) {
                s.adic.insert(e.clone());
            }
        }
        for x in space.exceptional() {
            if !self.exceptional.contains(&x.label) {
                s.exceptional.insert(x.label.clone());
            }
        }
        s.generics = (1..=space.types()).filter(|i| !self.generics.contains(i)).collect();
        s.divisibles = space.divisibles().difference(&self.divisibles).cloned().collect();
        s.normalize();
        s
    }

    pub fn difference(&self, o: &ZgSubset, space: &TameZgSpace) -> ZgSubset {
        self.intersection(&o.complement(space))
    }

    pub fn is_subset(&self, o: &ZgSubset) -> bool {
        self.union(o) == *o
    }

    /// Points other than divisibles.
    pub fn reduced_part(&self) -> ZgSubset {
        ZgSubset { divisibles: BTreeSet::new(), ..self.clone() }
    }

    /// Infinitely many lattice points of the tube.
    pub fn infinite_in(&self, tube: &Tube) -> bool {
        tube.quasi_simples.iter().any(|q| self.cofinite.contains_key(q))
    }

    /// The explicit non-lattice points, and one representative per lattice family.
    pub fn points(&self) -> Vec<Point> {
        let mut v: Vec<Point> = self.lattice.iter().map(|(e, l)| Point::Lattice(e.clone(), *l)).collect();
        v.extend(self.cofinite.iter().map(|(e, &k)| Point::Lattice(e.clone(), k)));
        v.extend(self.exceptional.iter().cloned().map(Point::Exceptional));
        v.extend(self.prufer.iter().cloned().map(Point::Prufer));
        v.extend(self.adic.iter().cloned().map(Point::Adic));
        v.extend(self.generics.iter().copied().map(Point::Generic));
        v.extend(self.divisibles.iter().cloned().map(Point::Divisible));
        v
    }
}

impl fmt::Display for ZgSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.lattice.iter().map(|(e, l)| format!("{e}[{l}]")).collect();
        parts.extend(self.cofinite.iter().map(|(e, k)| format!("{e}[{k}..]")));
        parts.extend(self.exceptional.iter().cloned());
        parts.extend(self.prufer.iter().map(|e| format!("{e}[inf]")));
        parts.extend(self.adic.iter().map(|e| format!("{e}^")));
        parts.extend(self.generics.iter().map(|i| format!("G({i})")));
        parts.extend(self.divisibles.iter().cloned());
        write!(f, "{{{}}}", parts.join(", "))
    }
}
