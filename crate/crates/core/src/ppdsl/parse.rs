use std::collections::BTreeMap;

use super::{ElemEnv, PpFormula};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let s = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push((s, Tok::Ident(chars[s..i].iter().collect())));
        } else if c.is_ascii_digit() {
            let s = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = chars[s..i].iter().collect();
            let v = t.parse().map_err(|_| Error::Syntax { pos: s, msg: "integer too large".into() })?;
            out.push((s, Tok::Int(v)));
        } else if "=&|*+-():,[]".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::Syntax { pos: i, msg: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Ast {
    Exists(Vec<String>, Box<Ast>),
    Conj(Vec<Ast>),
    Eq(Vec<Summand>, Vec<Summand>),
    Div(Vec<i64>, String),
}

#[derive(Clone, Debug)]
struct Summand {
    neg: bool,
    var: Option<String>,
    coef: Vec<i64>,
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    env: &'a ElemEnv,
    len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }
    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.len)
    }
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.here(), msg: msg.into() })
    }
    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn formula(&mut self) -> Result<Ast> {
        if self.peek() == Some(&Tok::Ident("E".into())) {
            // 'E' starts a quantifier block only if followed by identifiers and ':'
            let save = self.pos;
            self.pos += 1;
            let mut vars = Vec::new();
            while let Some(Tok::Ident(v)) = self.peek().cloned() {
                vars.push(v);
                self.pos += 1;
                self.eat(',');
            }
            if !vars.is_empty() && self.eat(':') {
                let body = self.conj()?;
                return Ok(Ast::Exists(vars, Box::new(body)));
            }
            self.pos = save;
        }
        self.conj()
    }

    fn conj(&mut self) -> Result<Ast> {
        let mut atoms = vec![self.atom()?];
        while self.eat('&') {
            atoms.push(self.atom()?);
        }
        Ok(if atoms.len() == 1 { atoms.pop().unwrap() } else { Ast::Conj(atoms) })
    }

    fn atom(&mut self) -> Result<Ast> {
        // parenthesized subformula, or a term beginning with '('? terms never start with '('
        if self.peek() == Some(&Tok::Sym('(')) {
            self.pos += 1;
            let f = self.formula()?;
            self.expect(')')?;
            return Ok(f);
        }
        // divisibility: elem '|' var
        let save = self.pos;
        if let Ok(e) = self.elem() {
            if self.eat('|') {
                return match self.peek().cloned() {
                    Some(Tok::Ident(v)) => {
                        self.pos += 1;
                        Ok(Ast::Div(e, v))
                    }
                    _ => self.err("expected a variable after '|'"),
                };
            }
        }
        self.pos = save;
        let lhs = self.term()?;
        self.expect('=')?;
        let rhs = self.term()?;
        Ok(Ast::Eq(lhs, rhs))
    }

    fn term(&mut self) -> Result<Vec<Summand>> {
        let mut out = Vec::new();
        let mut neg = self.eat('-');
        loop {
            out.push(self.summand(neg)?);
            if self.eat('+') {
                neg = false;
            } else if self.eat('-') {
                neg = true;
            } else {
                break;
            }
        }
        Ok(out)
    }

    fn summand(&mut self, neg: bool) -> Result<Summand> {
        match self.peek().cloned() {
            Some(Tok::Int(0)) => {
                self.pos += 1;
                Ok(Summand { neg, var: None, coef: vec![0; self.env.dim()] })
            }
            Some(Tok::Ident(v)) if !self.env.is_const(&v) => {
                self.pos += 1;
                let mut coef = self.env.unit().to_vec();
                while self.eat('*') {
                    let e = self.elem()?;
                    coef = self.env.mul(&coef, &e);
                }
                Ok(Summand { neg, var: Some(v), coef })
            }
            _ => self.err("expected a variable or 0"),
        }
    }

    fn elem(&mut self) -> Result<Vec<i64>> {
        let neg = self.eat('-');
        let v = match self.peek().cloned() {
            Some(Tok::Int(c)) => {
                self.pos += 1;
                self.env.unit().iter().map(|&u| u * c).collect()
            }
            Some(Tok::Ident(name)) => match self.env.get(&name) {
                Some(v) => {
                    self.pos += 1;
                    v.clone()
                }
                None => return self.err(format!("unknown constant '{name}'")),
            },
            Some(Tok::Sym('[')) => {
                self.pos += 1;
                let mut v = Vec::new();
                loop {
                    let sign = if self.eat('-') { -1 } else { 1 };
                    match self.peek().cloned() {
                        Some(Tok::Int(c)) => {
                            self.pos += 1;
                            v.push(sign * c);
                        }
                        _ => return self.err("expected an integer"),
                    }
                    if !self.eat(',') {
                        break;
                    }
                }
                self.expect(']')?;
                if v.len() != self.env.dim() {
                    return self.err(format!("element literal needs {} coordinates", self.env.dim()));
                }
                v
            }
            _ => return self.err("expected a ring element"),
        };
        Ok(if neg { v.into_iter().map(|x| -x).collect() } else { v })
    }
}

fn free_index(name: &str) -> Option<usize> {
    let rest = name.strip_prefix('x')?;
    if rest.is_empty() || rest.starts_with('0') {
        return None;
    }
    rest.parse::<usize>().ok().filter(|&k| k >= 1)
}

struct Compiler {
    unit: Vec<i64>,
    n: usize,
    bound: usize,
    cols: Vec<BTreeMap<usize, Vec<i64>>>,
    implicit: BTreeMap<String, usize>,
}

impl Compiler {
    fn var(&mut self, name: &str, scope: &[(String, usize)]) -> usize {
        if let Some(k) = free_index(name) {
            return k - 1;
        }
        if let Some((_, i)) = scope.iter().rev().find(|(s, _)| s == name) {
            return *i;
        }
        if let Some(&i) = self.implicit.get(name) {
            return i;
        }
        let i = self.fresh();
        self.implicit.insert(name.to_string(), i);
        i
    }

    fn fresh(&mut self) -> usize {
        self.bound += 1;
        usize::MAX - self.bound + 1
    }

    fn add(col: &mut BTreeMap<usize, Vec<i64>>, v: usize, coef: &[i64], neg: bool) {
        let e = col.entry(v).or_insert_with(|| vec![0; coef.len()]);
        for (a, &b) in e.iter_mut().zip(coef) {
            *a += if neg { -b } else { b };
        }
    }

    fn compile(&mut self, ast: &Ast, scope: &mut Vec<(String, usize)>) {
        match ast {
            Ast::Exists(vars, body) => {
                let before = scope.len();
                for v in vars {
                    let i = self.fresh();
                    scope.push((v.clone(), i));
                }
                self.compile(body, scope);
                scope.truncate(before);
            }
            Ast::Conj(items) => {
                for a in items {
                    self.compile(a, scope);
                }
            }
            Ast::Eq(l, r) => {
                let mut col = BTreeMap::new();
                for (s, side) in l.iter().map(|s| (s, false)).chain(r.iter().map(|s| (s, true))) {
                    if let Some(v) = &s.var {
                        let i = self.var(v, scope);
                        Self::add(&mut col, i, &s.coef, s.neg ^ side);
                    }
                }
                self.cols.push(col);
            }
            Ast::Div(e, v) => {
                let x = self.var(v, scope);
                let z = self.fresh();
                let mut col = BTreeMap::new();
                let unit = self.unit.clone();
                Self::add(&mut col, x, &unit, false);
                Self::add(&mut col, z, e, true);
                self.cols.push(col);
            }
        }
    }
}

/// Parse and normalize. With `arity`, free variables beyond it are an error and
/// the result has exactly that many free variables.
pub fn parse(text: &str, env: &ElemEnv, arity: Option<usize>) -> Result<PpFormula> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, env, len: text.len() };
    let ast = p.formula()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    let mut c = Compiler { unit: env.unit().to_vec(), n: 0, bound: 0, cols: Vec::new(), implicit: BTreeMap::new() };
    c.compile(&ast, &mut Vec::new());
    let mut n = 0;
    for col in &c.cols {
        for &k in col.keys() {
            if k < usize::MAX / 2 {
                n = n.max(k + 1);
            }
        }
    }
    collect_free(&ast, &mut n);
    let n = match arity {
        Some(a) if n > a => return Err(Error::Arity(format!("formula uses x{n} but arity is {a}"))),
        Some(a) => a,
        None => n.max(1),
    };
    c.n = n;
    let m = c.bound;
    let rows = n + m;
    let cols: Vec<Vec<Vec<i64>>> = c
        .cols
        .into_iter()
        .map(|col| {
            let mut v = vec![vec![0i64; env.dim()]; rows];
            for (k, coef) in col {
                let r = if k < usize::MAX / 2 { k } else { n + (usize::MAX - k) };
                for (a, b) in v[r].iter_mut().zip(coef) {
                    *a += b;
                }
            }
            v
        })
        .collect();
    Ok(PpFormula::with_env(n, m, env, cols))
}

fn collect_free(ast: &Ast, n: &mut usize) {
    match ast {
        Ast::Exists(_, b) => collect_free(b, n),
        Ast::Conj(items) => items.iter().for_each(|a| collect_free(a, n)),
        Ast::Eq(l, r) => {
            for s in l.iter().chain(r) {
                if let Some(k) = s.var.as_deref().and_then(free_index) {
                    *n = (*n).max(k);
                }
            }
        }
        Ast::Div(_, v) => {
            if let Some(k) = free_index(v) {
                *n = (*n).max(k);
            }
        }
    }
}
