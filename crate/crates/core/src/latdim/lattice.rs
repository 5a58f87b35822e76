use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A finite bounded lattice on 0..n with join and meet tables.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteLattice {
    n: usize,
    leq: Vec<Vec<bool>>,
    join: Vec<Vec<usize>>,
    meet: Vec<Vec<usize>>,
    top: usize,
    bottom: usize,
    pub labels: Vec<String>,
}

impl fmt::Debug for FiniteLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteLattice({} elements, covers {:?})", self.n, self.covers())
    }
}

impl FiniteLattice {
    /// From a partial order given as a reflexive relation; checks the lattice axioms.
    pub fn from_leq(leq: Vec<Vec<bool>>) -> Result<FiniteLattice> {
        let n = leq.len();
        if n == 0 {
            return Err(Error::Invalid("a lattice has at least one element".into()));
        }
        if leq.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("order relation must be n × n".into()));
        }
        for a in 0..n {
            if !leq[a][a] {
                return Err(Error::Invalid(format!("order is not reflexive at {a}")));
            }
            for b in 0..n {
                if a != b && leq[a][b] && leq[b][a] {
                    return Err(Error::Invalid(format!("order is not antisymmetric at ({a}, {b})")));
                }
                for c in 0..n {
                    if leq[a][b] && leq[b][c] && !leq[a][c] {
                        return Err(Error::Invalid(format!("order is not transitive at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        let least = |set: &[usize]| -> Option<usize> { set.iter().copied().find(|&x| set.iter().all(|&y| leq[x][y])) };
        let greatest = |set: &[usize]| -> Option<usize> { set.iter().copied().find(|&x| set.iter().all(|&y| leq[y][x])) };
        let all: Vec<usize> = (0..n).collect();
        let top = greatest(&all).ok_or_else(|| Error::Invalid("no top element".into()))?;
        let bottom = least(&all).ok_or_else(|| Error::Invalid("no bottom element".into()))?;
        let mut join = vec![vec![0; n]; n];
        let mut meet = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let ub: Vec<usize> = (0..n).filter(|&x| leq[a][x] && leq[b][x]).collect();
                let lb: Vec<usize> = (0..n).filter(|&x| leq[x][a] && leq[x][b]).collect();
                join[a][b] = least(&ub).ok_or_else(|| Error::Invalid(format!("no join of {a} and {b}")))?;
                meet[a][b] = greatest(&lb).ok_or_else(|| Error::Invalid(format!("no meet of {a} and {b}")))?;
            }
        }
        let labels = (0..n).map(|i| i.to_string()).collect();
        Ok(FiniteLattice { n, leq, join, meet, top, bottom, labels })
    }

    /// From cover (or any generating) pairs a < b, by reflexive-transitive closure.
    pub fn from_covers(n: usize, covers: &[(usize, usize)]) -> Result<FiniteLattice> {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in covers {
            if a >= n || b >= n {
                return Err(Error::Dimension(format!("cover ({a}, {b}) out of range")));
            }
            leq[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        FiniteLattice::from_leq(leq)
    }

    pub fn chain(k: usize) -> FiniteLattice {
        let covers: Vec<(usize, usize)> = (1..k).map(|i| (i - 1, i)).collect();
        FiniteLattice::from_covers(k.max(1), &covers).expect("chain")
    }

    /// The diamond M₃.
    pub fn diamond() -> FiniteLattice {
        FiniteLattice::from_covers(5, &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]).expect("M3")
    }

    /// The pentagon N₅.
    pub fn pentagon() -> FiniteLattice {
        FiniteLattice::from_covers(5, &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)]).expect("N5")
    }

    /// The Boolean lattice of subsets of a k-element set.
    pub fn boolean(k: usize) -> FiniteLattice {
        let n = 1usize << k;
        let leq = (0..n).map(|a| (0..n).map(|b| a & b == a).collect()).collect();
        FiniteLattice::from_leq(leq).expect("boolean")
    }

    pub fn size(&self) -> usize {
        self.n
    }
    pub fn top(&self) -> usize {
        self.top
    }
    pub fn bottom(&self) -> usize {
        self.bottom
    }
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a][b]
    }
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }
    pub fn is_trivial(&self) -> bool {
        self.n == 1
    }

    /// Cover relation (Hasse diagram) as pairs a ⋖ b.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if a != b && self.leq[a][b] && !(0..self.n).any(|c| c != a && c != b && self.leq[a][c] && self.leq[c][b]) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_modular(&self) -> bool {
        // a ≤ c ⇒ a ∨ (b ∧ c) = (a ∨ b) ∧ c
        (0..self.n).all(|a| {
            (0..self.n).all(|c| {
                !self.leq[a][c] || (0..self.n).all(|b| self.join[a][self.meet[b][c]] == self.meet[self.join[a][b]][c])
            })
        })
    }

    pub fn is_distributive(&self) -> bool {
        (0..self.n)
            .all(|a| (0..self.n).all(|b| (0..self.n).all(|c| self.meet[a][self.join[b][c]] == self.join[self.meet[a][b]][self.meet[a][c]])))
    }

    /// Length of the longest chain (number of covers along it).
    pub fn length(&self) -> usize {
        let order = self.linear_extension();
        let mut h = vec![0usize; self.n];
        for &b in &order {
            for &a in &order {
                if a != b && self.leq[a][b] {
                    h[b] = h[b].max(h[a] + 1);
                }
            }
        }
        h[self.top]
    }

    fn linear_extension(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.n).collect();
        idx.sort_by_key(|&a| (0..self.n).filter(|&b| self.leq[b][a]).count());
        idx
    }

    /// The interval [a, b] as a lattice, with the original elements of each position.
    pub fn interval(&self, a: usize, b: usize) -> Result<(FiniteLattice, Vec<usize>)> {
        if !self.leq[a][b] {
            return Err(Error::Invalid(format!("{a} is not below {b}")));
        }
        let elems: Vec<usize> = (0..self.n).filter(|&x| self.leq[a][x] && self.leq[x][b]).collect();
        let leq = elems.iter().map(|&x| elems.iter().map(|&y| self.leq[x][y]).collect()).collect();
        let mut l = FiniteLattice::from_leq(leq)?;
        l.labels = elems.iter().map(|&x| self.labels[x].clone()).collect();
        Ok((l, elems))
    }

    /// Whether the subset is closed under join and meet.
    pub fn is_sublattice(&self, s: &[usize]) -> bool {
        s.iter().all(|&a| s.iter().all(|&b| s.contains(&self.join[a][b]) && s.contains(&self.meet[a][b])))
    }

    /// The sublattice on a join- and meet-closed subset.
    pub fn sublattice(&self, s: &[usize]) -> Result<FiniteLattice> {
        if s.is_empty() || !self.is_sublattice(s) {
            return Err(Error::Invalid("subset is not a sublattice".into()));
        }
        let leq = s.iter().map(|&x| s.iter().map(|&y| self.leq[x][y]).collect()).collect();
        FiniteLattice::from_leq(leq)
    }

    /// Smallest congruence containing the pairs, as a class index per element.
    pub fn congruence(&self, pairs: &[(usize, usize)]) -> Vec<usize> {
        let mut uf = UnionFind::new(self.n);
        let mut work: Vec<(usize, usize)> = pairs.to_vec();
        while let Some((a, b)) = work.pop() {
            if !uf.union(a, b) {
                continue;
            }
            // compatibility with joins and meets, element by element
            for c in 0..self.n {
                work.push((self.join[a][c], self.join[b][c]));
                work.push((self.meet[a][c], self.meet[b][c]));
            }
        }
        let mut ids = vec![usize::MAX; self.n];
        let mut class = vec![0; self.n];
        let mut next = 0;
        for x in 0..self.n {
            let r = uf.find(x);
            if ids[r] == usize::MAX {
                ids[r] = next;
                next += 1;
            }
            class[x] = ids[r];
        }
        class
    }

    /// Whether a partition (class index per element) is a lattice congruence.
    pub fn is_congruence(&self, class: &[usize]) -> bool {
        (0..self.n).all(|a| {
            (0..self.n).all(|b| {
                class[a] != class[b]
                    || (0..self.n).all(|c| {
                        class[self.join[a][c]] == class[self.join[b][c]] && class[self.meet[a][c]] == class[self.meet[b][c]]
                    })
            })
        })
    }

    /// L/θ for the congruence generated by the pairs, with the canonical projection.
    pub fn congruence_quotient(&self, pairs: &[(usize, usize)]) -> (FiniteLattice, Vec<usize>) {
        let class = self.congruence(pairs);
        (self.quotient_by(&class), class)
    }

    /// Quotient by a congruence given as a class index per element.
    pub fn quotient_by(&self, class: &[usize]) -> FiniteLattice {
        let k = class.iter().max().map_or(0, |&m| m + 1);
        let mut rep = vec![usize::MAX; k];
        for (x, &c) in class.iter().enumerate() {
            if rep[c] == usize::MAX {
                rep[c] = x;
            }
        }
        // [a] ≤ [b] iff a ∨ b ≡ b
        let leq = (0..k).map(|i| (0..k).map(|j| class[self.join[rep[i]][rep[j]]] == j).collect()).collect();
        let mut q = FiniteLattice::from_leq(leq).expect("quotient of a lattice by a congruence");
        q.labels = rep.iter().map(|&x| self.labels[x].clone()).collect();
        q
    }

    /// A canonical relabelling key: the smallest order matrix over all relabellings
    /// that are linear extensions.
    pub fn canonical_key(&self) -> Vec<u64> {
        let n = self.n;
        let mut best: Option<Vec<u64>> = None;
        let mut perm = Vec::with_capacity(n);
        let mut used = vec![false; n];
        self.canon_rec(&mut perm, &mut used, &mut best);
        best.unwrap_or_default()
    }

    fn canon_rec(&self, perm: &mut Vec<usize>, used: &mut Vec<bool>, best: &mut Option<Vec<u64>>) {
        let n = self.n;
        if perm.len() == n {
            let key: Vec<u64> =
                (0..n).map(|i| (0..n).fold(0u64, |acc, j| (acc << 1) | u64::from(self.leq[perm[i]][perm[j]]))).collect();
            if best.as_ref().map_or(true, |b| key < *b) {
                *best = Some(key);
            }
            return;
        }
        for x in 0..n {
            // place x only once all its strict predecessors are placed
            if !used[x] && (0..n).all(|y| y == x || !self.leq[y][x] || used[y]) {
                used[x] = true;
                perm.push(x);
                self.canon_rec(perm, used, best);
                perm.pop();
                used[x] = false;
            }
        }
    }

    pub fn is_isomorphic(&self, other: &FiniteLattice) -> bool {
        self.n == other.n && self.canonical_key() == other.canonical_key()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// A class of finite lattices, used to decide which intervals get collapsed.
#[derive(Clone)]
pub enum IntervalClass {
    /// Lattices with at most two elements.
    TwoElement,
    Chain,
    Custom(String, Arc<dyn Fn(&FiniteLattice) -> bool + Send + Sync>),
}

impl fmt::Debug for IntervalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl IntervalClass {
    pub fn name(&self) -> &str {
        match self {
            IntervalClass::TwoElement => "two_element",
            IntervalClass::Chain => "chain",
            IntervalClass::Custom(n, _) => n,
        }
    }

    pub fn contains(&self, l: &FiniteLattice) -> bool {
        match self {
            IntervalClass::TwoElement => l.size() <= 2,
            IntervalClass::Chain => (0..l.size()).all(|a| (0..l.size()).all(|b| l.leq(a, b) || l.leq(b, a))),
            IntervalClass::Custom(_, f) => f(l),
        }
    }
}

/// One collapse step: the congruence generated by all intervals lying in the class.
pub fn collapse_step(l: &FiniteLattice, c: &IntervalClass) -> (FiniteLattice, Vec<usize>) {
    let mut pairs = Vec::new();
    for a in 0..l.size() {
        for b in 0..l.size() {
            if a != b && l.leq(a, b) {
                let (iv, _) = l.interval(a, b).expect("a ≤ b");
                if c.contains(&iv) {
                    pairs.push((a, b));
                }
            }
        }
    }
    l.congruence_quotient(&pairs)
}

/// L-dimension with respect to a class: −1 for the one-element lattice, otherwise the
/// least α such that α + 1 collapse steps reach the one-element lattice; undefined if
/// the collapse stalls.
pub fn ldim(l: &FiniteLattice, c: &IntervalClass) -> super::Ordinal {
    if l.is_trivial() {
        return super::Ordinal::MinusOne;
    }
    let mut cur = l.clone();
    let mut steps = 0u64;
    loop {
        let (q, _) = collapse_step(&cur, c);
        steps += 1;
        if q.is_trivial() {
            return super::Ordinal::nat(steps - 1);
        }
        if q.size() == cur.size() {
            return super::Ordinal::Undefined;
        }
        cur = q;
    }
}

/// All lattices with exactly n elements up to isomorphism (n ≤ 8 is practical).
pub fn enumerate_lattices(n: usize) -> Vec<FiniteLattice> {
    if n == 0 {
        return Vec::new();
    }
    if n <= 2 {
        return vec![FiniteLattice::chain(n)];
    }
    // inner elements 1..n-1, naturally labelled: i < j in the order only if i < j as numbers
    let inner = n - 2;
    let slots: Vec<(usize, usize)> = (0..inner).flat_map(|i| ((i + 1)..inner).map(move |j| (i, j))).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << slots.len()) {
        let mut rel = vec![vec![false; inner]; inner];
        for (k, &(i, j)) in slots.iter().enumerate() {
            rel[i][j] = mask >> k & 1 == 1;
        }
        // must already be transitive
        let transitive =
            (0..inner).all(|i| (0..inner).all(|j| !rel[i][j] || (0..inner).all(|k| !rel[j][k] || rel[i][k])));
        if !transitive {
            continue;
        }
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            leq[i][i] = true;
            leq[0][i] = true;
            leq[i][n - 1] = true;
        }
        for i in 0..inner {
            for j in 0..inner {
                if rel[i][j] {
                    leq[i + 1][j + 1] = true;
                }
            }
        }
        if let Ok(l) = FiniteLattice::from_leq(leq) {
            if seen.insert(l.canonical_key()) {
                out.push(l);
            }
        }
    }
    out
}
