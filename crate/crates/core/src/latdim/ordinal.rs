use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// An ordinal below ε₀ in Cantor normal form: Σ ω^{e_i}·c_i with e_1 > e_2 > … and c_i > 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Cnf(Vec<(Cnf, u64)>);

impl Cnf {
    pub fn zero() -> Cnf {
        Cnf(Vec::new())
    }

    pub fn nat(n: u64) -> Cnf {
        if n == 0 {
            Cnf::zero()
        } else {
            Cnf(vec![(Cnf::zero(), n)])
        }
    }

    pub fn omega() -> Cnf {
        Cnf(vec![(Cnf::nat(1), 1)])
    }

    /// ω^e·c.
    pub fn term(e: Cnf, c: u64) -> Cnf {
        if c == 0 {
            Cnf::zero()
        } else {
            Cnf(vec![(e, c)])
        }
    }

    /// Builds from (exponent, coefficient) terms; validates the normal form.
    pub fn from_terms(terms: Vec<(Cnf, u64)>) -> Result<Cnf> {
        if terms.iter().any(|(_, c)| *c == 0) {
            return Err(Error::Invalid("Cantor normal form coefficients must be positive".into()));
        }
        if terms.windows(2).any(|w| w[0].0 <= w[1].0) {
            return Err(Error::Invalid("Cantor normal form exponents must strictly decrease".into()));
        }
        Ok(Cnf(terms))
    }

    pub fn terms(&self) -> &[(Cnf, u64)] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self.0.as_slice() {
            [] => Some(0),
            [(e, c)] if e.is_zero() => Some(*c),
            _ => None,
        }
    }

    pub fn is_successor(&self) -> bool {
        self.0.last().is_some_and(|(e, _)| e.is_zero())
    }

    /// Predecessor of a successor ordinal.
    pub fn pred(&self) -> Option<Cnf> {
        if !self.is_successor() {
            return None;
        }
        let mut t = self.0.clone();
        let last = t.last_mut().expect("nonempty");
        if last.1 == 1 {
            t.pop();
        } else {
            last.1 -= 1;
        }
        Some(Cnf(t))
    }

    /// Ordinal sum (not commutative).
    pub fn add(&self, other: &Cnf) -> Cnf {
        let Some((lead, c)) = other.0.first() else {
            return self.clone();
        };
        let mut out: Vec<(Cnf, u64)> = self.0.iter().filter(|(e, _)| e >= lead).cloned().collect();
        match out.last_mut() {
            Some((e, k)) if e == lead => {
                *k += c;
                out.extend(other.0[1..].iter().cloned());
            }
            _ => out.extend(other.0.iter().cloned()),
        }
        Cnf(out)
    }

    /// Ordinal product (not commutative).
    pub fn mul(&self, other: &Cnf) -> Cnf {
        let Some((lead, a1)) = self.0.first() else {
            return Cnf::zero();
        };
        let mut out = Cnf::zero();
        for (e, c) in &other.0 {
            let piece = if e.is_zero() {
                let mut t = vec![(lead.clone(), a1 * c)];
                t.extend(self.0[1..].iter().cloned());
                Cnf(t)
            } else {
                Cnf(vec![(lead.add(e), *c)])
            };
            out = out.add(&piece);
        }
        out
    }
}

impl PartialOrd for Cnf {
    fn partial_cmp(&self, other: &Cnf) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cnf {
    fn cmp(&self, other: &Cnf) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.0.cmp(&b.0).then(a.1.cmp(&b.1)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl fmt::Display for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let base = match e.as_nat() {
                Some(0) => String::new(),
                Some(1) => "ω".to_string(),
                Some(k) => format!("ω^{k}"),
                None => format!("ω^({e})"),
            };
            match (base.is_empty(), *c) {
                (true, c) => write!(f, "{c}")?,
                (false, 1) => write!(f, "{base}")?,
                (false, c) => write!(f, "{base}·{c}")?,
            }
        }
        Ok(())
    }
}

/// A dimension value: an ordinal, the formal value −1 of the one-element lattice,
/// or undefined.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ordinal {
    MinusOne,
    Value(Cnf),
    Undefined,
}

impl Ordinal {
    pub fn nat(n: u64) -> Ordinal {
        Ordinal::Value(Cnf::nat(n))
    }

    pub fn omega() -> Ordinal {
        Ordinal::Value(Cnf::omega())
    }

    pub fn is_defined(&self) -> bool {
        !matches!(self, Ordinal::Undefined)
    }

    /// Comparison; undefined is incomparable with everything but itself.
    pub fn compare(&self, other: &Ordinal) -> Option<Ordering> {
        use Ordinal::*;
        match (self, other) {
            (Undefined, Undefined) => Some(Ordering::Equal),
            (Undefined, _) | (_, Undefined) => None,
            (MinusOne, MinusOne) => Some(Ordering::Equal),
            (MinusOne, _) => Some(Ordering::Less),
            (_, MinusOne) => Some(Ordering::Greater),
            (Value(a), Value(b)) => Some(a.cmp(b)),
        }
    }

    pub fn parse(s: &str) -> Result<Ordinal> {
        parse_ordinal(s)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ordinal::MinusOne => write!(f, "-1"),
            Ordinal::Undefined => write!(f, "undefined"),
            Ordinal::Value(c) => write!(f, "{c}"),
        }
    }
}

/// a + b. The value −1 behaves as the predecessor of 0: −1 + b is b with one unit
/// removed from the front when b is finite, and b otherwise; a + (−1) is the
/// predecessor of a, undefined when a is a limit.
pub fn ordinal_sum(a: &Ordinal, b: &Ordinal) -> Ordinal {
    use Ordinal::*;
    match (a, b) {
        (Undefined, _) | (_, Undefined) => Undefined,
        (MinusOne, MinusOne) => Undefined,
        (MinusOne, Value(y)) => match y.as_nat() {
            Some(0) => MinusOne,
            Some(k) => Ordinal::nat(k - 1),
            None => Value(y.clone()),
        },
        (Value(x), MinusOne) => {
            if x.is_zero() {
                MinusOne
            } else {
                x.pred().map_or(Undefined, Value)
            }
        }
        (Value(x), Value(y)) => Value(x.add(y)),
    }
}

/// Supremum of a list; undefined if any entry is, −1 for the empty list.
pub fn ordinal_sup(list: &[Ordinal]) -> Ordinal {
    let mut best = Ordinal::MinusOne;
    for o in list {
        match best.compare(o) {
            None => return Ordinal::Undefined,
            Some(Ordering::Less) => best = o.clone(),
            _ => {}
        }
    }
    best
}

/// (sup{a, b}, a + 1 + b): the lower and upper bounds for the dimension of the
/// middle term from those of the outer terms.
pub fn bounds_eval(dim_d: &Ordinal, dim_ker: &Ordinal) -> (Ordinal, Ordinal) {
    if !dim_d.is_defined() || !dim_ker.is_defined() {
        return (Ordinal::Undefined, Ordinal::Undefined);
    }
    let lower = ordinal_sup(&[dim_d.clone(), dim_ker.clone()]);
    let upper = ordinal_sum(&ordinal_sum(dim_d, &Ordinal::nat(1)), dim_ker);
    (lower, upper)
}

fn parse_ordinal(s: &str) -> Result<Ordinal> {
    let t = s.trim();
    match t {
        "-1" => return Ok(Ordinal::MinusOne),
        "undefined" | "undef" => return Ok(Ordinal::Undefined),
        _ => {}
    }
    let mut p = Parser { chars: t.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0 };
    let v = p.sum()?;
    if p.pos != p.chars.len() {
        return Err(Error::Syntax { pos: p.pos, msg: "trailing input in ordinal".into() });
    }
    Ok(Ordinal::Value(v))
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<Cnf> {
        let mut acc = self.product()?;
        while self.peek() == Some('+') {
            self.pos += 1;
            acc = acc.add(&self.product()?);
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Cnf> {
        let mut acc = self.power()?;
        while matches!(self.peek(), Some('·') | Some('*')) {
            self.pos += 1;
            acc = acc.mul(&self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Cnf> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self.atom()?;
            if base != Cnf::omega() {
                return Err(Error::Syntax { pos: self.pos, msg: "only ω may be raised to a power".into() });
            }
            return Ok(Cnf::term(e, 1));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Cnf> {
        match self.peek() {
            Some('ω') | Some('w') => {
                self.pos += 1;
                Ok(Cnf::omega())
            }
            Some('(') => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(')') {
                    return Err(Error::Syntax { pos: self.pos, msg: "expected ')'".into() });
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                s.parse().map(Cnf::nat).map_err(|_| Error::Syntax { pos: start, msg: "number too large".into() })
            }
            _ => Err(Error::Syntax { pos: self.pos, msg: "expected an ordinal".into() }),
        }
    }
}
