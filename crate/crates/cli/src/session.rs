//! Session files.
//!
//! A session is a line-oriented text file. The first meaningful line must be the
//! header `purity-lab/1`. Blank lines and anything after `#` are ignored. Every other
//! line is one declaration, and names must be declared before they are used.
//!
//! ```text
//! precision N                      working p-adic precision (at least 4)
//! work N                           digits used for lattice Hom computations
//! budget N                         enumeration limit in elements
//! order NAME p P unit U mult MATS  Z_p-order by structure constants
//! algebra NAME cyclic P N          Z/P^N
//! algebra NAME reduce ORDER K      ORDER / p^K ORDER
//! algebra NAME p P exp N unit U mult MATS
//! const RING NAME = COORDS         named ring element for formulas over RING
//! module NAME over ALG regular | free K | rank R act MATS
//! module NAME over ALG reduce LATTICE
//! module NAME quotient MODULE by ROWS
//! module NAME sum A B
//! lattice NAME over ORDER regular | rank R act MATS
//! lattice NAME sum A B
//! formula NAME over RING [arity N] = TEXT
//! map NAME from MODULE to MODULE matrix ROWS
//! datum NAME lambda ORDER gamma ORDER embed ROWS n N m M [ideal ROWS]
//! interp NAME identity ALG
//! interp NAME reduce RING P
//! interp NAME rr DATUM
//! interp NAME custom target ALG phi F psi F rho F...
//! finlat NAME chain K | diamond | pentagon | boolean K | covers N A<B ...
//! zgspace NAME                     followed by space lines, closed by `end`
//! ```
//!
//! MATS is a list of matrices separated by `|`, rows separated by `;`, entries by
//! spaces. All numbers are decimal.

use std::collections::BTreeMap;
use std::sync::Arc;

use purity_lab::algcore::{Budget, FModule, FiniteAlgebra, LatticeModule, ModMap, OrderDatum};
use purity_lab::exactlin::{RMatrix, Ring, Subgroup};
use purity_lab::interp::{InterpSpec, Probe};
use purity_lab::latdim::FiniteLattice;
use purity_lab::ppdsl::{parse, ElemEnv, PpFormula, PpPair};
use purity_lab::rrfun::{f_as_ppspec, BaeckstroemDatum};
use purity_lab::zgtop::TameZgSpace;
use purity_lab::{Error, Result};

pub const HEADER: &str = "purity-lab/1";
pub const DEFAULT_BUDGET: u128 = 1 << 20;

/// An interpretation functor together with where its probes live.
#[derive(Clone, Debug)]
pub struct InterpDecl {
    pub spec: InterpSpec,
    /// Ring name of the source (an order or an algebra).
    pub source: String,
}

#[derive(Clone, Debug)]
pub struct Session {
    pub precision: u32,
    pub work: u32,
    pub budget: u128,
    pub orders: BTreeMap<String, Arc<OrderDatum>>,
    pub algebras: BTreeMap<String, Arc<FiniteAlgebra>>,
    pub envs: BTreeMap<String, ElemEnv>,
    /// Modules with the name of their algebra.
    pub modules: BTreeMap<String, (String, FModule)>,
    /// Lattices with the name of their order.
    pub lattices: BTreeMap<String, (String, LatticeModule)>,
    pub formulas: BTreeMap<String, (String, PpFormula)>,
    pub maps: BTreeMap<String, ModMap>,
    pub data: BTreeMap<String, BaeckstroemDatum>,
    pub interps: BTreeMap<String, InterpDecl>,
    pub finlats: BTreeMap<String, FiniteLattice>,
    pub spaces: BTreeMap<String, TameZgSpace>,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { pos: line, msg: msg.into() }
}

fn num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| err(line, format!("expected a number, found '{s}'")))
}

/// Rows separated by `;`, entries by whitespace.
pub fn parse_rows(line: usize, text: &str) -> Result<Vec<Vec<i64>>> {
    let rows: Vec<Vec<i64>> = text
        .split(';')
        .map(|r| r.split_whitespace().map(|t| num(line, t)).collect::<Result<Vec<i64>>>())
        .collect::<Result<_>>()?;
    if rows.len() == 1 && rows[0].is_empty() {
        return Ok(Vec::new());
    }
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(err(line, "ragged matrix"));
    }
    Ok(rows)
}

/// Matrices separated by `|`.
pub fn parse_mats(line: usize, text: &str) -> Result<Vec<Vec<Vec<i64>>>> {
    text.split('|').map(|m| parse_rows(line, m)).collect()
}

/// Splits `key value... key value...` at the given keywords.
fn keyed<'a>(line: usize, text: &'a str, keys: &[&'a str]) -> Result<BTreeMap<&'a str, String>> {
    let mut out: BTreeMap<&str, String> = BTreeMap::new();
    let mut cur: Option<&str> = None;
    for tok in text.split_whitespace() {
        if let Some(k) = keys.iter().find(|k| **k == tok) {
            if out.contains_key(*k) {
                return Err(err(line, format!("'{tok}' given twice")));
            }
            out.insert(k, String::new());
            cur = Some(k);
        } else {
            let k = cur.ok_or_else(|| err(line, format!("unexpected '{tok}'")))?;
            let v = out.get_mut(k).expect("key present");
            if !v.is_empty() {
                v.push(' ');
            }
            v.push_str(tok);
        }
    }
    Ok(out)
}

fn need<'a>(line: usize, m: &'a BTreeMap<&str, String>, k: &str) -> Result<&'a String> {
    m.get(k).ok_or_else(|| err(line, format!("missing '{k}'")))
}

fn matrix_i64(ring: Ring, rows: &[Vec<i64>], cols: usize) -> Result<RMatrix> {
    RMatrix::from_i64_rows(ring, cols, rows)
}

impl Session {
    fn empty() -> Session {
        Session {
            precision: 16,
            work: 6,
            budget: DEFAULT_BUDGET,
            orders: BTreeMap::new(),
            algebras: BTreeMap::new(),
            envs: BTreeMap::new(),
            modules: BTreeMap::new(),
            lattices: BTreeMap::new(),
            formulas: BTreeMap::new(),
            maps: BTreeMap::new(),
            data: BTreeMap::new(),
            interps: BTreeMap::new(),
            finlats: BTreeMap::new(),
            spaces: BTreeMap::new(),
        }
    }

    pub fn budget(&self) -> Budget {
        Budget::with_limit(self.budget)
    }

    fn taken(&self, name: &str) -> bool {
        self.orders.contains_key(name)
            || self.algebras.contains_key(name)
            || self.modules.contains_key(name)
            || self.lattices.contains_key(name)
            || self.formulas.contains_key(name)
            || self.maps.contains_key(name)
            || self.data.contains_key(name)
            || self.interps.contains_key(name)
            || self.finlats.contains_key(name)
            || self.spaces.contains_key(name)
    }

    fn fresh(&self, line: usize, name: &str) -> Result<()> {
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(err(line, format!("bad name '{name}'")));
        }
        if self.taken(name) {
            return Err(err(line, format!("'{name}' declared twice")));
        }
        Ok(())
    }

    pub fn order(&self, name: &str) -> Result<&Arc<OrderDatum>> {
        self.orders.get(name).ok_or_else(|| Error::Invalid(format!("no order named '{name}'")))
    }

    pub fn algebra(&self, name: &str) -> Result<&Arc<FiniteAlgebra>> {
        self.algebras.get(name).ok_or_else(|| Error::Invalid(format!("no algebra named '{name}'")))
    }

    pub fn module(&self, name: &str) -> Result<&(String, FModule)> {
        self.modules.get(name).ok_or_else(|| Error::Invalid(format!("no module named '{name}'")))
    }

    pub fn lattice(&self, name: &str) -> Result<&(String, LatticeModule)> {
        self.lattices.get(name).ok_or_else(|| Error::Invalid(format!("no lattice named '{name}'")))
    }

    pub fn env(&self, ring: &str) -> Result<&ElemEnv> {
        self.envs.get(ring).ok_or_else(|| Error::Invalid(format!("no ring named '{ring}'")))
    }

    pub fn datum(&self, name: Option<&str>) -> Result<(&String, &BaeckstroemDatum)> {
        match name {
            Some(n) => self.data.get_key_value(n).ok_or_else(|| Error::Invalid(format!("no datum named '{n}'"))),
            None if self.data.len() == 1 => Ok(self.data.iter().next().expect("one datum")),
            None => Err(Error::Invalid("name the datum with datum=NAME".into())),
        }
    }

    pub fn interp(&self, name: &str) -> Result<&InterpDecl> {
        self.interps.get(name).ok_or_else(|| Error::Invalid(format!("no interpretation named '{name}'")))
    }

    pub fn space(&self, name: &str) -> Result<&TameZgSpace> {
        self.spaces.get(name).ok_or_else(|| Error::Invalid(format!("no space named '{name}'")))
    }

    /// A formula by name, or parsed from text over the given ring.
    pub fn formula(&self, text: &str, ring: &str) -> Result<PpFormula> {
        if let Some((r, f)) = self.formulas.get(text) {
            if r != ring {
                return Err(Error::RingMismatch(format!("formula '{text}' is over {r}, not {ring}")));
            }
            return Ok(f.clone());
        }
        parse(text, self.env(ring)?, None)
    }

    /// A session module or lattice as an interpretation probe.
    pub fn probe(&self, name: &str) -> Result<(String, Probe)> {
        if let Some((r, m)) = self.modules.get(name) {
            return Ok((r.clone(), Probe::Finite(m.clone())));
        }
        if let Some((r, l)) = self.lattices.get(name) {
            return Ok((r.clone(), Probe::Lattice { lattice: l.clone(), work: self.work }));
        }
        Err(Error::Invalid(format!("no module or lattice named '{name}'")))
    }

    /// All probes over a ring, in name order.
    pub fn probes_over(&self, ring: &str) -> Vec<(String, Probe)> {
        let mut out: Vec<(String, Probe)> = self
            .modules
            .iter()
            .filter(|(_, (r, _))| r == ring)
            .map(|(n, (_, m))| (n.clone(), Probe::Finite(m.clone())))
            .collect();
        out.extend(
            self.lattices
                .iter()
                .filter(|(_, (r, _))| r == ring)
                .map(|(n, (_, l))| (n.clone(), Probe::Lattice { lattice: l.clone(), work: self.work })),
        );
        out
    }

    pub fn parse(text: &str) -> Result<Session> {
        let mut s = Session::empty();
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut header = false;
        while let Some((no, raw)) = lines.next() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if !header {
                if line != HEADER {
                    return Err(err(no, format!("expected header '{HEADER}'")));
                }
                header = true;
                continue;
            }
            let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match kw {
                "precision" => {
                    s.precision = num(no, rest)?;
                    if s.precision < 4 {
                        return Err(err(no, "precision must be at least 4"));
                    }
                }
                "work" => s.work = num(no, rest)?,
                "budget" => s.budget = num(no, rest)?,
                "zgspace" => {
                    let name = rest.to_string();
                    s.fresh(no, &name)?;
                    let mut body = String::new();
                    let mut closed = false;
                    for (_, l) in lines.by_ref() {
                        if l.trim() == "end" {
                            closed = true;
                            break;
                        }
                        body.push_str(l);
                        body.push('\n');
                    }
                    if !closed {
                        return Err(err(no, "zgspace block without 'end'"));
                    }
                    s.spaces.insert(name, TameZgSpace::parse(&body)?);
                }
                _ => s.declare(no, kw, rest)?,
            }
        }
        if !header {
            return Err(err(1, format!("missing header '{HEADER}'")));
        }
        if s.work > s.precision {
            return Err(err(0, "work exceeds precision"));
        }
        Ok(s)
    }

    fn declare(&mut self, no: usize, kw: &str, rest: &str) -> Result<()> {
        let (name, body) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
        let body = body.trim();
        let name = name.to_string();
        if kw != "const" {
            self.fresh(no, &name)?;
        }
        match kw {
            "order" => {
                let m = keyed(no, body, &["p", "unit", "mult", "components"])?;
                let p: u64 = num(no, need(no, &m, "p")?)?;
                let unit = parse_rows(no, need(no, &m, "unit")?)?.concat();
                let consts = parse_mats(no, need(no, &m, "mult")?)?;
                let mut o = OrderDatum::new(p, consts, unit)?;
                if let Some(c) = m.get("components") {
                    for t in c.split_whitespace() {
                        let (n, d) = t.split_once(':').ok_or_else(|| err(no, "components are NAME:DIM"))?;
                        o.components.push((n.to_string(), num(no, d)?));
                    }
                }
                self.envs.insert(name.clone(), ElemEnv::from_order(&o));
                self.orders.insert(name, Arc::new(o));
            }
            "algebra" => {
                let toks: Vec<&str> = body.split_whitespace().collect();
                let (alg, env) = match toks.first().copied() {
                    Some("cyclic") if toks.len() == 3 => {
                        let ring = Ring::new(num(no, toks[1])?, num(no, toks[2])?)?;
                        let a = Arc::new(FiniteAlgebra::free(ring, vec![vec![vec![1]]], vec![1])?);
                        let env = ElemEnv::from_algebra(&a);
                        (a, env)
                    }
                    Some("reduce") if toks.len() == 3 => {
                        let o = self.order(toks[1])?.clone();
                        let a = o.algebra_mod(num(no, toks[2])?)?;
                        let mut env = ElemEnv::from_algebra(&a);
                        for (n, v) in self.env(toks[1])?.names() {
                            env.define(n, v.clone())?;
                        }
                        (a, env)
                    }
                    _ => {
                        let m = keyed(no, body, &["p", "exp", "unit", "mult"])?;
                        let ring = Ring::new(num(no, need(no, &m, "p")?)?, num(no, need(no, &m, "exp")?)?)?;
                        let unit: Vec<u64> =
                            parse_rows(no, need(no, &m, "unit")?)?.concat().iter().map(|&x| ring.from_i64(x)).collect();
                        let consts = parse_mats(no, need(no, &m, "mult")?)?
                            .iter()
                            .map(|mat| mat.iter().map(|r| r.iter().map(|&x| ring.from_i64(x)).collect()).collect())
                            .collect();
                        let a = Arc::new(FiniteAlgebra::free(ring, consts, unit)?);
                        let env = ElemEnv::from_algebra(&a);
                        (a, env)
                    }
                };
                self.envs.insert(name.clone(), env);
                self.algebras.insert(name, alg);
            }
            "const" => {
                let (head, coords) = body.split_once('=').ok_or_else(|| err(no, "const RING NAME = COORDS"))?;
                let cname = head.trim();
                let v = parse_rows(no, coords)?.concat();
                let env = self.envs.get_mut(&name).ok_or_else(|| err(no, format!("no ring named '{name}'")))?;
                env.define(cname, v)?;
            }
            "module" => {
                let toks: Vec<&str> = body.split_whitespace().collect();
                let (alg_name, m) = match toks.first().copied() {
                    Some("over") if toks.len() >= 3 => {
                        let alg = self.algebra(toks[1])?.clone();
                        let m = match toks[2] {
                            "regular" => FModule::regular(alg.clone())?,
                            "free" => FModule::free(alg.clone(), num(no, toks.get(3).copied().unwrap_or(""))?)?,
                            "reduce" => {
                                let l = &self.lattice(toks.get(3).copied().unwrap_or(""))?.1;
                                l.reduce_over(&alg)?
                            }
                            "rank" => {
                                let r: usize = num(no, toks.get(3).copied().unwrap_or(""))?;
                                if toks.get(4) != Some(&"act") {
                                    return Err(err(no, "expected 'act'"));
                                }
                                let text = toks[5..].join(" ");
                                let mats = parse_mats(no, &text)?;
                                let ring = alg.ring();
                                let acts =
                                    mats.iter().map(|mm| matrix_i64(ring, mm, r)).collect::<Result<Vec<_>>>()?;
                                FModule::new(alg.clone(), Subgroup::full(ring, r), acts)?
                            }
                            other => return Err(err(no, format!("unknown module form '{other}'"))),
                        };
                        (toks[1].to_string(), m)
                    }
                    Some("quotient") if toks.len() >= 4 && toks[2] == "by" => {
                        let (a, base) = self.module(toks[1])?.clone();
                        let rows = parse_rows(no, &toks[3..].join(" "))?;
                        let ring = base.ring();
                        if rows.iter().any(|r| r.len() != base.ambient()) {
                            return Err(err(no, "quotient rows must match the ambient width"));
                        }
                        let w = Subgroup::from_rows(
                            ring,
                            base.ambient(),
                            rows.iter().map(|r| r.iter().map(|&x| ring.from_i64(x)).collect()).collect(),
                        );
                        (a, base.quotient(&w)?)
                    }
                    Some("sum") if toks.len() == 3 => {
                        let (a, x) = self.module(toks[1])?.clone();
                        let (b, y) = self.module(toks[2])?.clone();
                        if a != b {
                            return Err(err(no, "summands over different algebras"));
                        }
                        (a, x.direct_sum(&y)?)
                    }
                    _ => return Err(err(no, "unknown module declaration")),
                };
                self.modules.insert(name, (alg_name, m));
            }
            "lattice" => {
                let toks: Vec<&str> = body.split_whitespace().collect();
                let (oname, l) = match toks.first().copied() {
                    Some("over") if toks.len() >= 3 => {
                        let o = self.order(toks[1])?.clone();
                        let l = match toks[2] {
                            "regular" => o.regular(self.precision)?,
                            "rank" => {
                                let r: usize = num(no, toks.get(3).copied().unwrap_or(""))?;
                                if toks.get(4) != Some(&"act") {
                                    return Err(err(no, "expected 'act'"));
                                }
                                let mats = parse_mats(no, &toks[5..].join(" "))?;
                                LatticeModule::from_i64(o, r, &mats, self.precision)?
                            }
                            other => return Err(err(no, format!("unknown lattice form '{other}'"))),
                        };
                        (toks[1].to_string(), l)
                    }
                    Some("sum") if toks.len() == 3 => {
                        let (a, x) = self.lattice(toks[1])?.clone();
                        let (b, y) = self.lattice(toks[2])?.clone();
                        if a != b {
                            return Err(err(no, "summands over different orders"));
                        }
                        (a, x.direct_sum(&y)?)
                    }
                    _ => return Err(err(no, "unknown lattice declaration")),
                };
                self.lattices.insert(name, (oname, l));
            }
            "formula" => {
                let (head, text) = body.split_once('=').ok_or_else(|| err(no, "formula NAME over RING = TEXT"))?;
                let toks: Vec<&str> = head.split_whitespace().collect();
                let (ring, arity) = match toks.as_slice() {
                    ["over", r] => (r.to_string(), None),
                    ["over", r, "arity", n] => (r.to_string(), Some(num(no, n)?)),
                    _ => return Err(err(no, "formula NAME over RING [arity N] = TEXT")),
                };
                let f = parse(text.trim(), self.env(&ring)?, arity)?;
                self.formulas.insert(name, (ring, f));
            }
            "map" => {
                let m = keyed(no, body, &["from", "to", "matrix"])?;
                let src = self.module(need(no, &m, "from")?)?.1.clone();
                let tgt = self.module(need(no, &m, "to")?)?.1.clone();
                let rows = parse_rows(no, need(no, &m, "matrix")?)?;
                let x = matrix_i64(src.ring(), &rows, tgt.ambient())?;
                self.maps.insert(name, ModMap::new(src, tgt, x)?);
            }
            "datum" => {
                let m = keyed(no, body, &["lambda", "gamma", "embed", "ideal", "n", "m"])?;
                let lam = self.order(need(no, &m, "lambda")?)?.clone();
                let gam = self.order(need(no, &m, "gamma")?)?.clone();
                let embed = parse_rows(no, need(no, &m, "embed")?)?;
                let ideal = m.get("ideal").map(|t| parse_rows(no, t)).transpose()?;
                let n = num(no, need(no, &m, "n")?)?;
                let mm = num(no, need(no, &m, "m")?)?;
                let b = BaeckstroemDatum::new(lam, gam, embed, ideal, n, mm, self.precision)?;
                self.data.insert(name, b);
            }
            "interp" => {
                let toks: Vec<&str> = body.split_whitespace().collect();
                let decl = match toks.as_slice() {
                    ["identity", a] => {
                        let alg = self.algebra(a)?;
                        InterpDecl { spec: InterpSpec::identity(alg), source: a.to_string() }
                    }
                    ["reduce", r, p] => {
                        let p: i64 = num(no, p)?;
                        let env = self.env(r)?.clone();
                        let target = match self.orders.get(*r) {
                            Some(o) => o.algebra_mod(1)?,
                            None => self.algebra(r)?.clone(),
                        };
                        InterpDecl { spec: InterpSpec::reduction_mod_p(env, target, p)?, source: r.to_string() }
                    }
                    ["rr", d] => {
                        let (_, b) = self.datum(Some(d))?;
                        let dd = b.build_d()?;
                        let spec = f_as_ppspec(b, &dd)?;
                        let lam = self
                            .orders
                            .iter()
                            .find(|(_, o)| o.as_ref() == b.lambda().as_ref())
                            .map(|(n, _)| n.clone())
                            .ok_or_else(|| err(no, "datum order not declared"))?;
                        InterpDecl { spec, source: lam }
                    }
                    ["custom", ..] => {
                        let joined = toks[1..].join(" ");
                        let m = keyed(no, &joined, &["target", "phi", "psi", "rho"])?;
                        let target = self.algebra(need(no, &m, "target")?)?.clone();
                        let get = |f: &str| -> Result<(String, PpFormula)> {
                            self.formulas.get(f).cloned().ok_or_else(|| err(no, format!("no formula named '{f}'")))
                        };
                        let (ring, phi) = get(need(no, &m, "phi")?)?;
                        let (ring2, psi) = get(need(no, &m, "psi")?)?;
                        let mut rho = Vec::new();
                        for f in need(no, &m, "rho")?.split_whitespace() {
                            let (r, g) = get(f)?;
                            if r != ring {
                                return Err(err(no, "graphs over a different ring"));
                            }
                            rho.push(g);
                        }
                        if ring != ring2 {
                            return Err(err(no, "phi and psi over different rings"));
                        }
                        let env = self.env(&ring)?.clone();
                        InterpDecl { spec: InterpSpec::new(env, target, PpPair::new(phi, psi)?, rho)?, source: ring }
                    }
                    _ => return Err(err(no, "unknown interp declaration")),
                };
                self.interps.insert(name, decl);
            }
            "finlat" => {
                let l = builtin_lattice(body).ok_or_else(|| err(no, "unknown lattice form"))??;
                self.finlats.insert(name, l);
            }
            other => return Err(err(no, format!("unknown declaration '{other}'"))),
        }
        Ok(())
    }
}

/// `chain K`, `diamond`, `pentagon`, `boolean K` or `covers N A<B ...`; also with `:`
/// in place of the first space.
pub fn builtin_lattice(text: &str) -> Option<Result<FiniteLattice>> {
    let t = text.replacen(':', " ", 1);
    let toks: Vec<&str> = t.split_whitespace().collect();
    let arg = |i: usize| toks.get(i).and_then(|s| s.parse::<usize>().ok());
    match toks.first().copied()? {
        "chain" => arg(1).map(|k| Ok(FiniteLattice::chain(k))),
        "diamond" => Some(Ok(FiniteLattice::diamond())),
        "pentagon" => Some(Ok(FiniteLattice::pentagon())),
        "boolean" => arg(1).map(|k| Ok(FiniteLattice::boolean(k))),
        "covers" => {
            let n = arg(1)?;
            let mut pairs = Vec::new();
            for c in &toks[2..] {
                let (a, b) = c.split_once('<')?;
                pairs.push((a.parse().ok()?, b.parse().ok()?));
            }
            Some(FiniteLattice::from_covers(n, &pairs))
        }
        _ => None,
    }
}
