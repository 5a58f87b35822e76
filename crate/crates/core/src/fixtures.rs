//! Built-in example data.

use std::sync::Arc;

use crate::algcore::{LatticeModule, OrderDatum};
use crate::rrfun::BaeckstroemDatum;
use crate::error::Result;

/// Λ = {(a,b) ∈ Z_2 × Z_2 : a ≡ b mod 2} in the basis (1,1), (0,2).
pub fn e1_order() -> Arc<OrderDatum> {
    let consts = vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![0, 2]]];
    let mut o = OrderDatum::new(2, consts, vec![1, 0]).expect("valid order");
    o.components = vec![("Q2".into(), 1), ("Q2".into(), 1)];
    Arc::new(o)
}

/// The rank-one lattice on which (0,2) acts as 0.
pub fn e1_r1(o: &Arc<OrderDatum>, prec: u32) -> Result<LatticeModule> {
    LatticeModule::from_i64(o.clone(), 1, &[vec![vec![1]], vec![vec![0]]], prec)
}

/// The rank-one lattice on which (0,2) acts as 2.
pub fn e1_r2(o: &Arc<OrderDatum>, prec: u32) -> Result<LatticeModule> {
    LatticeModule::from_i64(o.clone(), 1, &[vec![vec![1]], vec![vec![2]]], prec)
}

/// Γ = Z_2 × Z_2 with orthogonal idempotent basis.
pub fn e1_gamma() -> Arc<OrderDatum> {
    let consts = vec![vec![vec![1, 0], vec![0, 0]], vec![vec![0, 0], vec![0, 1]]];
    let mut o = OrderDatum::new(2, consts, vec![1, 1]).expect("valid order");
    o.components = vec![("Q2".into(), 1), ("Q2".into(), 1)];
    Arc::new(o)
}

/// Λ ⊆ Γ with I = rad Λ = 2Γ, n = m = 1.
pub fn e1_datum(prec: u32) -> Result<BaeckstroemDatum> {
    BaeckstroemDatum::new(e1_order(), e1_gamma(), vec![vec![1, 1], vec![0, 2]], None, 1, 1, prec)
}
