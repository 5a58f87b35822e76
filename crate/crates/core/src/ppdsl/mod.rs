//! Positive primitive formulas in matrix form: ∃ȳ (x̄ȳ)A = 0.

mod eval;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

use crate::algcore::{FiniteAlgebra, OrderDatum};
use crate::error::{Error, Result};

pub use eval::{
    chi_alpha, evaluate, evaluate_lattice, free_realization, join, leq, meet, presentation_on, pptype_generator, FamilyOrder,
    PointedModule, Presentation,
};
pub use parse::parse;

/// Named ring elements and the multiplication used to read coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElemEnv {
    dim: usize,
    unit: Vec<i64>,
    consts: Vec<Vec<Vec<i64>>>,
    modulus: Option<u64>,
    names: BTreeMap<String, Vec<i64>>,
}

impl ElemEnv {
    pub fn from_algebra(alg: &FiniteAlgebra) -> ElemEnv {
        let s = |v: &[u64]| v.iter().map(|&x| x as i64).collect::<Vec<_>>();
        ElemEnv {
            dim: alg.dim(),
            unit: s(alg.unit()),
            consts: alg.consts().iter().map(|row| row.iter().map(|v| s(v)).collect()).collect(),
            modulus: Some(alg.ring().modulus()),
            names: BTreeMap::new(),
        }
    }

    pub fn from_order(order: &OrderDatum) -> ElemEnv {
        ElemEnv {
            dim: order.dim(),
            unit: order.unit().to_vec(),
            consts: order.consts().to_vec(),
            modulus: None,
            names: BTreeMap::new(),
        }
    }

    /// Declare a named constant. Names of the form x1, x2, ... are reserved.
    pub fn define(&mut self, name: &str, value: Vec<i64>) -> Result<()> {
        if value.len() != self.dim {
            return Err(Error::Dimension(format!("constant {name} needs {} coordinates", self.dim)));
        }
        if name == "E" || is_free_name(name) {
            return Err(Error::Invalid(format!("'{name}' is reserved")));
        }
        let v = self.reduce(value);
        self.names.insert(name.to_string(), v);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn unit(&self) -> &[i64] {
        &self.unit
    }
    pub fn modulus(&self) -> Option<u64> {
        self.modulus
    }
    pub fn get(&self, name: &str) -> Option<&Vec<i64>> {
        self.names.get(name)
    }
    pub fn is_const(&self, name: &str) -> bool {
        self.names.contains_key(name)
    }
    pub fn names(&self) -> impl Iterator<Item = (&String, &Vec<i64>)> {
        self.names.iter()
    }

    pub fn reduce(&self, v: Vec<i64>) -> Vec<i64> {
        match self.modulus {
            Some(m) => v.into_iter().map(|x| x.rem_euclid(m as i64)).collect(),
            None => v,
        }
    }

    pub fn mul(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        let mut out = vec![0i128; self.dim];
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                for (o, &c) in out.iter_mut().zip(&self.consts[i][j]) {
                    *o += a as i128 * b as i128 * c as i128;
                    if let Some(m) = self.modulus {
                        *o = o.rem_euclid(m as i128);
                    }
                }
            }
        }
        self.reduce(out.into_iter().map(|v| v as i64).collect())
    }

    pub fn neg(&self, v: &[i64]) -> Vec<i64> {
        self.reduce(v.iter().map(|x| -x).collect())
    }

    fn fmt_elem(&self, v: &[i64]) -> String {
        if let Some((name, _)) = self.names.iter().find(|(_, w)| w.as_slice() == v) {
            return name.clone();
        }
        if self.dim == 1 && self.unit == [1] {
            return v[0].to_string();
        }
        let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        format!("[{}]", parts.join(","))
    }
}

fn is_free_name(name: &str) -> bool {
    name.strip_prefix('x').is_some_and(|r| !r.is_empty() && r.bytes().all(|b| b.is_ascii_digit()))
}

/// ∃ȳ (x̄ȳ)A = 0 with A stored column by column; cols[j][r] is the coefficient of
/// variable r (free first, then bound) in equation j.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PpFormula {
    n: usize,
    m: usize,
    dim: usize,
    cols: Vec<Vec<Vec<i64>>>,
}

impl PpFormula {
    /// Build and normalize. Coefficients are taken as given (callers reduce them).
    pub fn new(n: usize, m: usize, dim: usize, cols: Vec<Vec<Vec<i64>>>) -> PpFormula {
        PpFormula { n, m, dim, cols }.normalized(None)
    }

    /// Build, reduce coefficients in the environment, and normalize.
    pub fn with_env(n: usize, m: usize, env: &ElemEnv, cols: Vec<Vec<Vec<i64>>>) -> PpFormula {
        PpFormula { n, m, dim: env.dim(), cols }.normalized(Some(env))
    }

    /// The formula x1 = x1 & ... & xn = xn.
    pub fn top(n: usize, dim: usize) -> PpFormula {
        PpFormula { n, m: 0, dim, cols: Vec::new() }
    }

    /// The formula x1 = 0 & ... & xn = 0.
    pub fn bottom(n: usize, dim: usize, unit: &[i64]) -> PpFormula {
        let cols = (0..n)
            .map(|i| (0..n).map(|r| if r == i { unit.to_vec() } else { vec![0; dim] }).collect())
            .collect();
        PpFormula::new(n, 0, dim, cols)
    }

    pub fn free_arity(&self) -> usize {
        self.n
    }
    pub fn bound_arity(&self) -> usize {
        self.m
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn columns(&self) -> &[Vec<Vec<i64>>] {
        &self.cols
    }

    pub fn normalize(&self, env: &ElemEnv) -> PpFormula {
        self.clone().normalized(Some(env))
    }

    fn normalized(mut self, env: Option<&ElemEnv>) -> PpFormula {
        let zero = vec![0i64; self.dim];
        if let Some(env) = env {
            for col in &mut self.cols {
                for c in col.iter_mut() {
                    *c = env.reduce(std::mem::take(c));
                }
            }
        }
        self.cols.retain(|c| c.iter().any(|v| *v != zero));
        for col in &mut self.cols {
            let neg: Vec<Vec<i64>> = match env {
                Some(e) => col.iter().map(|v| e.neg(v)).collect(),
                None => col.iter().map(|v| v.iter().map(|x| -x).collect()).collect(),
            };
            let flip = match env.and_then(|e| e.modulus()) {
                Some(_) => neg < *col,
                None => col.iter().flatten().find(|&&x| x != 0).is_some_and(|&x| x < 0),
            };
            if flip {
                *col = neg;
            }
        }
        // drop bound variables no equation mentions
        let used: Vec<usize> = (self.n..self.n + self.m)
            .filter(|&r| self.cols.iter().any(|c| c[r] != zero))
            .collect();
        if used.len() != self.m {
            for col in &mut self.cols {
                let mut keep: Vec<Vec<i64>> = col[..self.n].to_vec();
                keep.extend(used.iter().map(|&r| col[r].clone()));
                *col = keep;
            }
            self.m = used.len();
        }
        self.cols.sort();
        self.cols.dedup();
        self
    }

    pub fn display<'a>(&'a self, env: &'a ElemEnv) -> FormulaDisplay<'a> {
        FormulaDisplay { f: self, env }
    }

    pub fn to_text(&self, env: &ElemEnv) -> String {
        self.display(env).to_string()
    }
}

pub struct FormulaDisplay<'a> {
    f: &'a PpFormula,
    env: &'a ElemEnv,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let f = self.f;
        let name = |r: usize| if r < f.n { format!("x{}", r + 1) } else { format!("y{}", r - f.n + 1) };
        if f.m > 0 {
            let ys: Vec<String> = (0..f.m).map(|k| format!("y{}", k + 1)).collect();
            write!(out, "E {} : ", ys.join(" "))?;
        }
        let mut atoms = Vec::new();
        let zero = vec![0i64; f.dim];
        for col in &f.cols {
            let terms: Vec<String> = col
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != zero)
                .map(|(r, c)| {
                    if c.as_slice() == self.env.unit() {
                        name(r)
                    } else {
                        format!("{}*{}", name(r), self.env.fmt_elem(c))
                    }
                })
                .collect();
            atoms.push(format!("{} = 0", terms.join(" + ")));
        }
        let last = f.n - 1;
        if f.cols.iter().all(|c| c[last] == zero) {
            atoms.push(format!("x{} = x{}", f.n, f.n));
        }
        write!(out, "{}", atoms.join(" & "))
    }
}

/// Incremental construction of a formula from linear equations.
#[derive(Clone, Debug)]
pub struct PpBuilder {
    n: usize,
    m: usize,
    dim: usize,
    eqs: Vec<Vec<(usize, Vec<i64>)>>,
}

/// A variable of a formula under construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    Free(usize),
    Bound(usize),
}

impl PpBuilder {
    pub fn new(n: usize, dim: usize) -> PpBuilder {
        PpBuilder { n, m: 0, dim, eqs: Vec::new() }
    }

    pub fn bound(&mut self) -> Var {
        self.m += 1;
        Var::Bound(self.m - 1)
    }

    pub fn bounds(&mut self, k: usize) -> Vec<Var> {
        (0..k).map(|_| self.bound()).collect()
    }

    /// Σ var·coef = 0.
    pub fn equation(&mut self, terms: &[(Var, Vec<i64>)]) {
        self.eqs.push(
            terms
                .iter()
                .map(|(v, c)| {
                    let idx = match *v {
                        Var::Free(i) => i,
                        Var::Bound(k) => usize::MAX - k,
                    };
                    (idx, c.clone())
                })
                .collect(),
        );
    }

    /// Conjoin a formula with its free variables substituted by `vars`.
    pub fn include(&mut self, f: &PpFormula, vars: &[Var]) {
        let fresh = self.bounds(f.m);
        for col in &f.cols {
            let terms: Vec<(Var, Vec<i64>)> = col
                .iter()
                .enumerate()
                .map(|(r, c)| (if r < f.n { vars[r] } else { fresh[r - f.n] }, c.clone()))
                .collect();
            self.equation(&terms);
        }
    }

    pub fn finish(self, env: &ElemEnv) -> PpFormula {
        let (n, m) = (self.n, self.m);
        let cols = self
            .eqs
            .into_iter()
            .map(|eq| {
                let mut col = vec![vec![0i64; self.dim]; n + m];
                for (idx, c) in eq {
                    let r = if idx < n { idx } else { n + (usize::MAX - idx) };
                    for (o, v) in col[r].iter_mut().zip(c) {
                        *o += v;
                    }
                }
                col
            })
            .collect();
        PpFormula::with_env(n, m, env, cols)
    }
}

/// A pair φ/ψ of formulas of the same arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PpPair {
    pub phi: PpFormula,
    pub psi: PpFormula,
}

impl PpPair {
    pub fn new(phi: PpFormula, psi: PpFormula) -> Result<PpPair> {
        if phi.n != psi.n {
            return Err(Error::Arity(format!("pair of arities {} and {}", phi.n, psi.n)));
        }
        Ok(PpPair { phi, psi })
    }

    pub fn arity(&self) -> usize {
        self.phi.n
    }
}
