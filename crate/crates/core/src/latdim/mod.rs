//! Finite lattices, congruence collapse and the dimension it defines, and ordinal
//! arithmetic in Cantor normal form.

mod lattice;
mod ordinal;

pub use lattice::{collapse_step, enumerate_lattices, ldim, FiniteLattice, IntervalClass};
pub use ordinal::{bounds_eval, ordinal_sum, ordinal_sup, Cnf, Ordinal};

impl FiniteLattice {
    /// Elements and covers, one line each: `elements a b c` then `a < b` per cover.
    pub fn to_text(&self) -> String {
        let mut s = format!("elements {}\n", self.labels.join(" "));
        for (a, b) in self.covers() {
            s.push_str(&format!("{} < {}\n", self.labels[a], self.labels[b]));
        }
        s
    }
}
