use std::collections::BTreeMap;

use serde_json::{json, Value};

use purity_lab::algcore::{
    end_ring, endolength, ext1, hom_space, is_indecomposable, iso_test, lattice_homs, lattice_is_indecomposable,
    lattice_iso, FModule, IsoOutcome, LatticeModule,
};
use purity_lab::exactlin::{solve, RMatrix, Subgroup};
use purity_lab::interp::{
    apply_object, fullness_check, kernel_member, presentation, presentation_verify, validate, PairStatus, Probe,
};
use purity_lab::latdim::{bounds_eval, ldim, FiniteLattice, IntervalClass, Ordinal};
use purity_lab::maranda::{interval_lattice, interval_routes_agree, k0_family, pseudoendolength, MarandaReport};
use purity_lab::ppdsl::{chi_alpha, evaluate, evaluate_lattice, leq, pptype_generator, ElemEnv, PointedModule};
use purity_lab::rrfun::{
    apply_f, enumerate_indecomposables, f_as_ppspec, primitive_idempotents, realize_triple, DAlgebra, TripleModule,
};
use purity_lab::zgtop::{bar_v, cb_rank, cb_ranks, closure, is_closed};
use purity_lab::{Error, Result};

use crate::fixtures;
use crate::session::{builtin_lattice, Session};

/// Text and JSON renderings of one command result, with its exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub code: i32,
}

impl Outcome {
    fn ok(text: String, json: Value) -> Outcome {
        Outcome { text, json, code: 0 }
    }

    fn flagged(text: String, json: Value, violation: bool) -> Outcome {
        Outcome { text, json, code: i32::from(violation) }
    }

    pub fn from_error(e: &Error) -> Outcome {
        Outcome { text: format!("error: {e}"), json: json!({ "error": e.to_string() }), code: exit_code(e) }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Budget(_) | Error::Precision(_) => 3,
        _ => 2,
    }
}

pub const COMMANDS: &[&str] = &[
    "eval-pp",
    "pp-leq",
    "pptype-gen",
    "chi-alpha",
    "hom",
    "end",
    "endolength",
    "ext1",
    "iso",
    "indec",
    "reduce",
    "k0",
    "maranda-check",
    "psel",
    "interval-lattice",
    "interp-validate",
    "interp-apply",
    "interp-full",
    "interp-present",
    "rr-build-d",
    "rr-apply",
    "rr-ppspec",
    "rr-indclass",
    "rr-realize",
    "ldim",
    "mdim",
    "breadth",
    "ord-bounds",
    "zg-closure",
    "zg-closed",
    "zg-barv",
    "zg-cbrank",
    "fixtures",
];

/// Commands that do not read a session file.
pub fn needs_session(cmd: &str) -> bool {
    !matches!(cmd, "ord-bounds" | "fixtures")
}

fn usage(msg: &str) -> Error {
    Error::Invalid(msg.to_string())
}

const OPTIONS: &[&str] = &["L", "datum", "index", "class"];

/// Positional arguments and `key=value` options.
struct Args<'a> {
    pos: Vec<&'a str>,
    opts: BTreeMap<&'a str, &'a str>,
}

impl<'a> Args<'a> {
    fn new(args: &'a [String]) -> Args<'a> {
        let mut pos = Vec::new();
        let mut opts = BTreeMap::new();
        for a in args {
            match a.split_once('=') {
                Some((k, v)) if OPTIONS.contains(&k) => {
                    opts.insert(k, v);
                }
                _ => pos.push(a.as_str()),
            }
        }
        Args { pos, opts }
    }

    fn at(&self, i: usize, what: &str) -> Result<&'a str> {
        self.pos.get(i).copied().ok_or_else(|| usage(&format!("missing argument: {what}")))
    }

    fn num(&self, i: usize, what: &str) -> Result<u32> {
        let s = self.at(i, what)?;
        s.parse().map_err(|_| usage(&format!("{what} must be a number, got '{s}'")))
    }
}

fn fmt_vec(v: &[u64]) -> String {
    if v.len() == 1 {
        v[0].to_string()
    } else {
        let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

/// A tuple of M^n flattened over an ambient of width g.
fn fmt_tuple(v: &[u64], n: usize) -> String {
    if n <= 1 {
        return fmt_vec(v);
    }
    let g = v.len() / n;
    let parts: Vec<String> = v.chunks(g.max(1)).map(fmt_vec).collect();
    format!("({})", parts.join(","))
}

fn fmt_signed(m: &RMatrix) -> String {
    let rows: Vec<String> = m
        .signed_rows()
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
        .collect();
    format!("[{}]", rows.join(";"))
}

const LIST_LIMIT: u32 = 12;

/// Element list for small subgroups, generators otherwise.
fn render_subgroup(s: &Subgroup, n: usize) -> (String, Value) {
    let p = s.ring().p();
    let small = (p as u128).pow(s.order_log().min(64)) <= 1 << LIST_LIMIT;
    if small {
        let elems = s.sorted_elements();
        let text: Vec<String> = elems.iter().map(|e| fmt_tuple(e, n)).collect();
        (format!("{{{}}}", text.join(", ")), json!({ "order_log": s.order_log(), "elements": elems }))
    } else {
        let gens: Vec<String> = s.rows().iter().map(|e| fmt_tuple(e, n)).collect();
        (
            format!("order {p}^{} generated by {{{}}}", s.order_log(), gens.join(", ")),
            json!({ "order_log": s.order_log(), "generators": s.rows() }),
        )
    }
}

/// Tuple `a b, c d`: entries separated by commas, coordinates by spaces.
fn parse_tuple(text: &str, m: &FModule) -> Result<Vec<Vec<u64>>> {
    let ring = m.ring();
    text.split(',')
        .map(|e| {
            let v: Vec<u64> = e
                .split_whitespace()
                .map(|t| t.parse::<i64>().map(|x| ring.from_i64(x)))
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| usage(&format!("bad tuple entry '{e}'")))?;
            if v.len() != m.ambient() {
                return Err(Error::Dimension(format!("tuple entry '{e}' needs {} coordinates", m.ambient())));
            }
            Ok(v)
        })
        .collect()
}

enum Obj<'a> {
    Finite(&'a str, &'a FModule),
    Lattice(&'a str, &'a LatticeModule),
}

fn object<'a>(s: &'a Session, name: &str) -> Result<Obj<'a>> {
    if let Some((r, m)) = s.modules.get(name) {
        return Ok(Obj::Finite(r, m));
    }
    if let Some((r, l)) = s.lattices.get(name) {
        return Ok(Obj::Lattice(r, l));
    }
    Err(Error::Invalid(format!("no module or lattice named '{name}'")))
}

fn lattice_arg<'a>(s: &'a Session, name: &str) -> Result<&'a LatticeModule> {
    Ok(&s.lattice(name)?.1)
}

fn finlat(s: &Session, name: &str) -> Result<FiniteLattice> {
    if let Some(l) = s.finlats.get(name) {
        return Ok(l.clone());
    }
    builtin_lattice(name).ok_or_else(|| Error::Invalid(format!("no finite lattice named '{name}'")))?
}

fn log_p_name(p: u64, k: u32) -> String {
    format!("{p}^{k}")
}

/// Run one command. `session` is None only for commands that need none.
pub fn run(cmd: &str, session: Option<&Session>, args: &[String]) -> Result<Outcome> {
    let a = Args::new(args);
    if !needs_session(cmd) {
        return match cmd {
            "ord-bounds" => ord_bounds(&a),
            _ => fixtures_cmd(&a),
        };
    }
    let s = session.ok_or_else(|| usage("this command needs a session file"))?;
    match cmd {
        "eval-pp" => eval_pp(s, &a),
        "pp-leq" => pp_leq(s, &a),
        "pptype-gen" => pptype_gen(s, &a),
        "chi-alpha" => chi(s, &a),
        "hom" => hom(s, &a),
        "end" => end(s, &a),
        "endolength" => endolength_cmd(s, &a),
        "ext1" => ext1_cmd(s, &a),
        "iso" => iso(s, &a),
        "indec" => indec(s, &a),
        "reduce" => reduce(s, &a),
        "k0" => k0(s, &a),
        "maranda-check" => maranda_check(s, &a),
        "psel" => psel(s, &a),
        "interval-lattice" => interval(s, &a),
        "interp-validate" => interp_validate(s, &a),
        "interp-apply" => interp_apply(s, &a),
        "interp-full" => interp_full(s, &a),
        "interp-present" => interp_present(s, &a),
        "rr-build-d" => rr_build_d(s, &a),
        "rr-apply" => rr_apply(s, &a),
        "rr-ppspec" => rr_ppspec(s, &a),
        "rr-indclass" => rr_indclass(s, &a),
        "rr-realize" => rr_realize(s, &a),
        "ldim" => ldim_cmd(s, &a, None),
        "mdim" => ldim_cmd(s, &a, Some(IntervalClass::TwoElement)),
        "breadth" => ldim_cmd(s, &a, Some(IntervalClass::Chain)),
        "zg-closure" | "zg-closed" | "zg-barv" => zg_set(s, cmd, &a),
        "zg-cbrank" => zg_cbrank(s, &a),
        other => Err(usage(&format!("unknown command '{other}'"))),
    }
}

fn eval_pp(s: &Session, a: &Args) -> Result<Outcome> {
    let text = a.at(0, "formula")?;
    match object(s, a.at(1, "module")?)? {
        Obj::Finite(r, m) => {
            let f = s.formula(text, r)?;
            let sol = evaluate(&f, m)?;
            let (t, j) = render_subgroup(&sol, f.free_arity());
            Ok(Outcome::ok(t, j))
        }
        Obj::Lattice(r, l) => {
            let f = s.formula(text, r)?;
            let sol = evaluate_lattice(&f, l, s.work)?;
            let gens: Vec<String> = sol.rows().iter().map(|e| fmt_tuple(e, f.free_arity())).collect();
            let p = sol.ring().p();
            Ok(Outcome::ok(
                format!("span{{{}}} mod {}", gens.join(", "), log_p_name(p, s.work)),
                json!({ "work": s.work, "generators": sol.rows() }),
            ))
        }
    }
}

fn pp_leq(s: &Session, a: &Args) -> Result<Outcome> {
    let (ft, gt) = (a.at(0, "formula")?, a.at(1, "formula")?);
    let ring = match (s.formulas.get(ft), a.pos.get(2)) {
        (Some((r, _)), _) => r.clone(),
        (None, Some(m)) => s.module(m)?.0.clone(),
        _ => return Err(usage("inline formulas need a module to fix the ring")),
    };
    let (f, g) = (s.formula(ft, &ring)?, s.formula(gt, &ring)?);
    let names: Vec<String> = if a.pos.len() > 2 {
        a.pos[2..].iter().map(|n| n.to_string()).collect()
    } else {
        s.modules.iter().filter(|(_, (r, _))| *r == ring).map(|(n, _)| n.clone()).collect()
    };
    let fam: Vec<FModule> = names.iter().map(|n| s.module(n).map(|(_, m)| m.clone())).collect::<Result<_>>()?;
    let res = leq(&f, &g, &fam)?;
    let text = match res.counterexample {
        None => format!("true (on {} modules)", fam.len()),
        Some(i) => format!("false (fails on {})", names[i]),
    };
    Ok(Outcome::ok(
        text,
        json!({ "holds": res.holds, "family": names, "counterexample": res.counterexample.map(|i| names[i].clone()) }),
    ))
}

fn pptype_gen(s: &Session, a: &Args) -> Result<Outcome> {
    let (r, m) = s.module(a.at(0, "module")?)?;
    let tuple = parse_tuple(a.at(1, "tuple")?, m)?;
    let pm = PointedModule::new(m.clone(), tuple)?;
    let env = s.env(r)?;
    let f = pptype_generator(&pm, env)?;
    let t = f.to_text(env);
    Ok(Outcome::ok(t.clone(), json!({ "formula": t })))
}

fn chi(s: &Session, a: &Args) -> Result<Outcome> {
    let get = |n: &str| s.maps.get(n).ok_or_else(|| Error::Invalid(format!("no map named '{n}'")));
    let delta = get(a.at(0, "delta")?)?;
    let alpha = get(a.at(1, "alpha")?)?;
    let c = parse_tuple(a.at(2, "tuple")?, &alpha.tgt)?;
    let env = ElemEnv::from_algebra(alpha.tgt.algebra());
    let f = chi_alpha(delta, alpha, &c, &env)?;
    let t = f.to_text(&env);
    Ok(Outcome::ok(t.clone(), json!({ "formula": t })))
}

fn hom(s: &Session, a: &Args) -> Result<Outcome> {
    match (object(s, a.at(0, "source")?)?, object(s, a.at(1, "target")?)?) {
        (Obj::Finite(_, m), Obj::Finite(_, n)) => {
            let h = hom_space(m, n)?;
            let p = m.ring().p();
            Ok(Outcome::ok(
                format!("|Hom| = {}", log_p_name(p, h.order_log())),
                json!({ "p": p, "order_log": h.order_log() }),
            ))
        }
        (Obj::Lattice(_, l), Obj::Lattice(_, m)) => {
            let h = lattice_homs(l, m, s.work)?;
            let mut text = format!("Hom is free of rank {}", h.basis.len());
            for b in &h.basis {
                text.push_str(&format!("\n{}", fmt_signed(b)));
            }
            let basis: Vec<Vec<Vec<i64>>> = h.basis.iter().map(|b| b.signed_rows()).collect();
            Ok(Outcome::ok(text, json!({ "rank": h.basis.len(), "digits": h.valid, "basis": basis })))
        }
        _ => Err(usage("hom needs two finite modules or two lattices")),
    }
}

fn end(s: &Session, a: &Args) -> Result<Outcome> {
    match object(s, a.at(0, "module")?)? {
        Obj::Finite(_, m) => {
            let (alg, _) = end_ring(m)?;
            let p = m.ring().p();
            Ok(Outcome::ok(
                format!("|End| = {} with {} additive generators", log_p_name(p, alg.order_log()), alg.dim()),
                json!({ "p": p, "order_log": alg.order_log(), "generators": alg.dim() }),
            ))
        }
        Obj::Lattice(_, l) => {
            let h = lattice_homs(l, l, s.work)?;
            Ok(Outcome::ok(format!("End is free of rank {}", h.basis.len()), json!({ "rank": h.basis.len() })))
        }
    }
}

fn endolength_cmd(s: &Session, a: &Args) -> Result<Outcome> {
    let (_, m) = s.module(a.at(0, "module")?)?;
    let e = endolength(m, &s.budget())?;
    Ok(Outcome::ok(format!("endolength = {e}"), json!({ "endolength": e })))
}

fn ext1_cmd(s: &Session, a: &Args) -> Result<Outcome> {
    let l = lattice_arg(s, a.at(0, "lattice")?)?;
    let m = lattice_arg(s, a.at(1, "lattice")?)?;
    let inv = ext1(l, m, s.work)?;
    let p = l.order().p();
    let logs: Vec<u32> = inv
        .iter()
        .map(|&q| {
            let (mut k, mut x) = (0, q);
            while x > 1 {
                x /= p;
                k += 1;
            }
            k
        })
        .collect();
    let exponent = logs.iter().copied().max().unwrap_or(0);
    let group = if inv.is_empty() {
        "0".to_string()
    } else {
        inv.iter().map(|q| format!("Z/{q}")).collect::<Vec<_>>().join(" + ")
    };
    Ok(Outcome::ok(
        format!("Ext1 = {group}\nannihilator exponent = {exponent}"),
        json!({ "invariants": inv, "exponent": exponent }),
    ))
}

fn iso(s: &Session, a: &Args) -> Result<Outcome> {
    let b = s.budget();
    let verdict = match (object(s, a.at(0, "first")?)?, object(s, a.at(1, "second")?)?) {
        (Obj::Finite(_, m), Obj::Finite(_, n)) => match iso_test(m, n, &b)? {
            IsoOutcome::Iso(_) => "iso",
            IsoOutcome::NotIso => "not iso",
            IsoOutcome::Unknown => "unknown",
        },
        (Obj::Lattice(_, l), Obj::Lattice(_, m)) => {
            if lattice_iso(l, m, s.work, &b)? {
                "iso"
            } else {
                "not iso"
            }
        }
        _ => return Err(usage("iso needs two finite modules or two lattices")),
    };
    Ok(Outcome::ok(verdict.to_string(), json!({ "verdict": verdict })))
}

fn indec(s: &Session, a: &Args) -> Result<Outcome> {
    let b = s.budget();
    let yes = match object(s, a.at(0, "module")?)? {
        Obj::Finite(_, m) => is_indecomposable(m, &b)?,
        Obj::Lattice(_, l) => lattice_is_indecomposable(l, s.work, &b)?,
    };
    let t = if yes { "indecomposable" } else { "decomposable" };
    Ok(Outcome::ok(t.to_string(), json!({ "indecomposable": yes })))
}

fn reduce(s: &Session, a: &Args) -> Result<Outcome> {
    let l = lattice_arg(s, a.at(0, "lattice")?)?;
    let k = a.num(1, "k")?;
    let m = l.reduce_mod(k)?;
    let p = l.order().p();
    let mut text = format!("|L/{p}^{k}L| = {}", log_p_name(p, m.order_log()));
    let acts: Vec<String> = m.actions().iter().map(|x| x.to_string()).collect();
    text.push_str(&format!("\nactions {}", acts.join(" | ")));
    Ok(Outcome::ok(text, json!({ "order_log": m.order_log(), "actions": acts })))
}

fn family(s: &Session, a: &Args) -> Result<Vec<(String, LatticeModule)>> {
    if a.pos.is_empty() {
        Ok(s.lattices.iter().map(|(n, (_, l))| (n.clone(), l.clone())).collect())
    } else {
        a.pos.iter().map(|n| Ok((n.to_string(), lattice_arg(s, n)?.clone()))).collect()
    }
}

fn k0(s: &Session, a: &Args) -> Result<Outcome> {
    let fam = family(s, a)?;
    let ls: Vec<LatticeModule> = fam.iter().map(|(_, l)| l.clone()).collect();
    let k = k0_family(&ls, s.work)?;
    let names: Vec<&String> = fam.iter().map(|(n, _)| n).collect();
    Ok(Outcome::ok(format!("k0 = {k}"), json!({ "k0": k, "family": names })))
}

fn maranda_check(s: &Session, a: &Args) -> Result<Outcome> {
    let fam = family(s, a)?;
    let rep = MarandaReport::build(&fam, s.work, &s.budget())?;
    let alarms = rep.alarms();
    Ok(Outcome::flagged(rep.to_text(), json!({ "k0": rep.k0, "alarms": alarms, "report": rep.to_text() }), alarms > 0))
}

fn psel(s: &Session, a: &Args) -> Result<Outcome> {
    let l = lattice_arg(s, a.at(0, "lattice")?)?;
    let k = a.num(1, "k")?;
    let ps = pseudoendolength(l, k, &s.budget())?;
    let text = match ps.value() {
        Some(v) => format!("pseudoendolength = {v}"),
        None => {
            let (x, y) = ps.ratio();
            format!("pseudoendolength ratio {x}/{y} is not an integer")
        }
    };
    Ok(Outcome::ok(
        format!("{text}\nendolength at k = {}, at k+1 = {}", ps.endolength_k, ps.endolength_next),
        json!({ "k": k, "value": ps.value(), "endolength_k": ps.endolength_k, "endolength_next": ps.endolength_next }),
    ))
}

fn interval(s: &Session, a: &Args) -> Result<Outcome> {
    let l = lattice_arg(s, a.at(0, "lattice")?)?;
    let k = a.num(1, "k")?;
    let b = s.budget();
    let lat = interval_lattice(l, k, &b)?;
    let agree = interval_routes_agree(l, k, &b)?;
    let text = format!(
        "size {}\nlength {}\nmodular {}\nroutes agree {}\n{}",
        lat.size(),
        lat.length(),
        lat.is_modular(),
        agree,
        lat.to_text().trim_end()
    );
    Ok(Outcome::ok(
        text,
        json!({ "size": lat.size(), "length": lat.length(), "modular": lat.is_modular(), "routes_agree": agree, "covers": lat.covers() }),
    ))
}

fn probes(s: &Session, source: &str, names: &[&str]) -> Result<Vec<(String, Probe)>> {
    if names.is_empty() {
        return Ok(s.probes_over(source));
    }
    names
        .iter()
        .map(|n| {
            let (r, p) = s.probe(n)?;
            if r != source {
                return Err(Error::RingMismatch(format!("'{n}' is over {r}, not {source}")));
            }
            Ok((n.to_string(), p))
        })
        .collect()
}

fn interp_validate(s: &Session, a: &Args) -> Result<Outcome> {
    let d = s.interp(a.at(0, "interp")?)?;
    let ps = probes(s, &d.source, &a.pos[1..])?;
    let list: Vec<Probe> = ps.iter().map(|(_, p)| p.clone()).collect();
    let rep = validate(&d.spec, &list)?;
    let mut lines = Vec::new();
    let mut js = Vec::new();
    for m in &rep.members {
        let name = &ps[m.index].0;
        if m.ok() {
            lines.push(format!("{name}: ok"));
        }
        for f in &m.failures {
            let g = f.generator.map(|g| format!(" graph {}", g + 1)).unwrap_or_default();
            lines.push(format!("{name}: {:?}{g} witness {}", f.kind, fmt_vec(&f.witness)));
        }
        js.push(json!({ "name": name, "failures": m.failures.iter().map(|f| format!("{:?}", f.kind)).collect::<Vec<_>>() }));
    }
    lines.push(format!("valid = {}", rep.ok()));
    Ok(Outcome::flagged(lines.join("\n"), json!({ "valid": rep.ok(), "members": js }), !rep.ok()))
}

fn interp_apply(s: &Session, a: &Args) -> Result<Outcome> {
    let d = s.interp(a.at(0, "interp")?)?;
    let name = a.at(1, "module")?;
    let ps = probes(s, &d.source, &[name])?;
    let obj = apply_object(&d.spec, &ps[0].1)?;
    let kern = kernel_member(&d.spec, &ps[0].1)?;
    let p = obj.module.ring().p();
    Ok(Outcome::ok(
        format!("|I({name})| = {}\nkernel member {kern}", log_p_name(p, obj.module.order_log())),
        json!({ "order_log": obj.module.order_log(), "kernel_member": kern }),
    ))
}

fn interp_full(s: &Session, a: &Args) -> Result<Outcome> {
    let d = s.interp(a.at(0, "interp")?)?;
    let ps = probes(s, &d.source, &a.pos[1..])?;
    let list: Vec<Probe> = ps.iter().map(|(_, p)| p.clone()).collect();
    let rep = fullness_check(&d.spec, &list, &list)?;
    let mut lines = Vec::new();
    for pr in &rep.pairs {
        let st = match &pr.status {
            PairStatus::Surjective => "onto".to_string(),
            PairStatus::NotSurjective { witness } => format!("not onto, missed {}", fmt_vec(witness)),
        };
        lines.push(format!(
            "{} -> {}: {st} (hom p^{}, image p^{})",
            ps[pr.source].0, ps[pr.target].0, pr.hom_log, pr.image_log
        ));
    }
    lines.push(format!("full = {}", rep.full()));
    Ok(Outcome::ok(lines.join("\n"), json!({ "full": rep.full(), "pairs": rep.pairs.len() })))
}

fn interp_present(s: &Session, a: &Args) -> Result<Outcome> {
    let d = s.interp(a.at(0, "interp")?)?;
    let order = s.orders.get(&d.source).ok_or_else(|| usage("presentations need a functor on lattices over an order"))?;
    let pres = presentation(&d.spec, order, s.precision)?;
    let ps = probes(s, &d.source, &a.pos[1..])?;
    let list: Vec<Probe> = ps.iter().map(|(_, p)| p.clone()).collect();
    let check = presentation_verify(&pres, &d.spec, &list)?;
    let mut lines = vec![format!("A rank {}, B rank {}", pres.a.rank(), pres.b.rank())];
    for m in &check.members {
        lines.push(format!(
            "{}: onto {} kills {} coker p^{} target p^{}",
            ps[m.index].0, m.onto, m.kills_image, m.coker_log, m.target_log
        ));
    }
    lines.push(format!("natural {}", check.natural));
    lines.push(format!("verified = {}", check.ok()));
    Ok(Outcome::flagged(
        lines.join("\n"),
        json!({ "a_rank": pres.a.rank(), "b_rank": pres.b.rank(), "verified": check.ok() }),
        !check.ok(),
    ))
}

fn rr_setup<'a>(s: &'a Session, a: &Args) -> Result<(&'a purity_lab::rrfun::BaeckstroemDatum, DAlgebra)> {
    let (_, b) = s.datum(a.opts.get("datum").copied())?;
    let d = b.build_d()?;
    Ok((b, d))
}

fn rr_build_d(s: &Session, a: &Args) -> Result<Outcome> {
    let (b, d) = rr_setup(s, a)?;
    let p = b.p();
    let text = format!(
        "baeckstroem {}\nn = {}, m = {}\n|Lambda/I| = {}\n|Gamma/I| = {}\n|D| = {}",
        b.is_baeckstroem(),
        b.n(),
        b.m(),
        log_p_name(p, d.lam.order_log()),
        log_p_name(p, d.gam.order_log()),
        log_p_name(p, d.algebra.order_log())
    );
    Ok(Outcome::ok(
        text,
        json!({ "baeckstroem": b.is_baeckstroem(), "lam_log": d.lam.order_log(), "gam_log": d.gam.order_log(), "d_log": d.algebra.order_log() }),
    ))
}

/// (log_p |U| | log_p |Ve| per primitive idempotent e of Γ/I | f on the generators of U,
/// in coordinates adapted to the decomposition V = ⊕ Ve).
pub fn triple_text(t: &TripleModule, idems: &[Vec<u64>]) -> Result<String> {
    let mut dims = Vec::new();
    let mut blocks = Vec::new();
    for e in idems {
        let act = t.v.action_of(e);
        let ve = t.v.carrier().map(&act)?;
        dims.push(ve.order_log().to_string());
        blocks.push((act, ve));
    }
    let gens = t.u.carrier().rows();
    let mut cols: Vec<Vec<u64>> = Vec::new();
    for x in gens {
        let y = t.f.apply(x);
        let mut col = Vec::new();
        for (act, ve) in &blocks {
            if ve.rows().is_empty() {
                continue;
            }
            let ye = act.apply(&y);
            let basis = RMatrix::from_rows(ve.ring(), ve.ambient(), ve.rows())?;
            let (c, _) = solve(&basis, &ye)?.ok_or_else(|| Error::Validation("f(u)e outside Ve".into()))?;
            col.extend(c);
        }
        cols.push(col);
    }
    let height = cols.first().map_or(0, |c| c.len());
    let rows: Vec<String> = (0..height)
        .map(|i| cols.iter().map(|c| c[i].to_string()).collect::<Vec<_>>().join(","))
        .collect();
    Ok(format!("({} | {} | [{}])", t.u.order_log(), dims.join(","), rows.join(";")))
}

fn sorted_idems(d: &DAlgebra, s: &Session) -> Result<Vec<Vec<u64>>> {
    let mut idems = primitive_idempotents(&d.gam, &s.budget())?;
    idems.sort();
    Ok(idems)
}

fn rr_apply(s: &Session, a: &Args) -> Result<Outcome> {
    let (b, d) = rr_setup(s, a)?;
    let name = a.opts.get("L").copied().or(a.pos.first().copied()).ok_or_else(|| usage("missing L=LATTICE"))?;
    let l = lattice_arg(s, name)?;
    let t = apply_f(b, &d, l)?;
    let text = triple_text(&t, &sorted_idems(&d, s)?)?;
    Ok(Outcome::ok(text.clone(), json!({ "lattice": name, "triple": text })))
}

fn rr_ppspec(s: &Session, a: &Args) -> Result<Outcome> {
    let (b, d) = rr_setup(s, a)?;
    let spec = f_as_ppspec(b, &d)?;
    let env = &spec.source;
    let mut lines = vec![format!("phi: {}", spec.pair.phi.to_text(env)), format!("psi: {}", spec.pair.psi.to_text(env))];
    for (i, r) in spec.rho.iter().enumerate() {
        lines.push(format!("rho{}: {}", i + 1, r.to_text(env)));
    }
    Ok(Outcome::ok(lines.join("\n"), json!({ "lines": lines })))
}

fn rr_indclass(s: &Session, a: &Args) -> Result<Outcome> {
    let (_, d) = rr_setup(s, a)?;
    let ind = enumerate_indecomposables(&d, 2, &s.budget())?;
    let idems = sorted_idems(&d, s)?;
    let texts: Vec<String> = ind.iter().map(|t| triple_text(t, &idems)).collect::<Result<_>>()?;
    let mut lines: Vec<String> = texts.iter().enumerate().map(|(i, t)| format!("T{} {t}", i + 1)).collect();
    lines.push(format!("count {}", ind.len()));
    Ok(Outcome::ok(lines.join("\n"), json!({ "triples": texts })))
}

fn rr_realize(s: &Session, a: &Args) -> Result<Outcome> {
    let (b, d) = rr_setup(s, a)?;
    let bud = s.budget();
    let (label, t, orig) = if let Some(name) = a.opts.get("L") {
        let l = lattice_arg(s, name)?;
        (format!("F({name})"), apply_f(b, &d, l)?, Some(l))
    } else {
        let i: usize = a
            .opts
            .get("index")
            .ok_or_else(|| usage("give index=I (see rr-indclass) or L=LATTICE"))?
            .parse()
            .map_err(|_| usage("index must be a number"))?;
        let ind = enumerate_indecomposables(&d, 2, &bud)?;
        let t = ind.get(i.wrapping_sub(1)).cloned().ok_or_else(|| usage(&format!("index {i} out of range")))?;
        (format!("T{i}"), t, None)
    };
    let m = realize_triple(b, &d, &t, &bud)?;
    let back = apply_f(b, &d, &m)?;
    let ok = iso_test(&back.to_module(&d)?, &t.to_module(&d)?, &bud)?.is_iso();
    let mut lines = vec![format!("{label} realized by a lattice of rank {}", m.rank())];
    let small = m.at_precision(s.work)?;
    for (i, act) in small.actions().iter().enumerate() {
        lines.push(format!("action {}: {}", i + 1, fmt_signed(act)));
    }
    lines.push(format!("F(M) iso T: {ok}"));
    let mut violation = !ok;
    let mut js = json!({ "rank": m.rank(), "round_trip": ok });
    if let Some(l) = orig {
        let same = lattice_iso(&m, &l.at_precision(m.prec())?, s.work, &bud)?;
        lines.push(format!("M iso L: {same}"));
        js["lattice_iso"] = json!(same);
        violation |= !same;
    }
    Ok(Outcome::flagged(lines.join("\n"), js, violation))
}

fn ldim_cmd(s: &Session, a: &Args, class: Option<IntervalClass>) -> Result<Outcome> {
    let l = finlat(s, a.at(0, "lattice")?)?;
    let class = match class {
        Some(c) => c,
        None => match a.opts.get("class").copied().unwrap_or("two_element") {
            "two_element" => IntervalClass::TwoElement,
            "chain" => IntervalClass::Chain,
            other => return Err(usage(&format!("unknown class '{other}'"))),
        },
    };
    let v = ldim(&l, &class);
    Ok(Outcome::ok(v.to_string(), json!({ "class": class.name(), "value": v.to_string() })))
}

fn ord_bounds(a: &Args) -> Result<Outcome> {
    let x = Ordinal::parse(a.at(0, "dim of D")?)?;
    let y = Ordinal::parse(a.at(1, "dim of the kernel")?)?;
    let (lo, hi) = bounds_eval(&x, &y);
    Ok(Outcome::ok(format!("lower={lo} upper={hi}"), json!({ "lower": lo.to_string(), "upper": hi.to_string() })))
}

fn zg_set(s: &Session, cmd: &str, a: &Args) -> Result<Outcome> {
    let sp = s.space(a.at(0, "space")?)?;
    let text = if a.pos.len() > 1 { a.pos[1..].join(" ") } else { String::new() };
    let set = sp.parse_subset(&text)?;
    match cmd {
        "zg-closure" => {
            let c = closure(sp, &set)?;
            Ok(Outcome::ok(c.to_string(), json!({ "closure": c.to_string() })))
        }
        "zg-closed" => {
            let c = is_closed(sp, &set)?;
            Ok(Outcome::ok(c.to_string(), json!({ "closed": c })))
        }
        _ => {
            let c = bar_v(sp, &set)?;
            Ok(Outcome::ok(c.to_string(), json!({ "bar_v": c.to_string() })))
        }
    }
}

fn zg_cbrank(s: &Session, a: &Args) -> Result<Outcome> {
    let sp = s.space(a.at(0, "space")?)?;
    let fmt = |r: Option<u32>| r.map_or("undefined".to_string(), |v| v.to_string());
    match a.pos.get(1) {
        Some(p) if *p != "all" => {
            let pt = sp.parse_point(p)?;
            let r = cb_rank(sp, &pt)?;
            Ok(Outcome::ok(fmt(r), json!({ "point": pt.to_string(), "rank": r })))
        }
        _ => {
            let ranks = cb_ranks(sp)?;
            let lines: Vec<String> = ranks.iter().map(|(p, r)| format!("{p} {}", fmt(*r))).collect();
            let js: Vec<Value> = ranks.iter().map(|(p, r)| json!({ "point": p.to_string(), "rank": r })).collect();
            Ok(Outcome::ok(lines.join("\n"), json!({ "ranks": js })))
        }
    }
}

fn fixtures_cmd(a: &Args) -> Result<Outcome> {
    let text = match a.at(0, "fixture name")? {
        "e1" => fixtures::E1,
        "e2" => fixtures::E2,
        other => return Err(usage(&format!("unknown fixture '{other}'"))),
    };
    Ok(Outcome::ok(text.trim_end().to_string(), json!({ "session": text })))
}
