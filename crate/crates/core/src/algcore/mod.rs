//! Finite algebras, their modules, orders and lattices.

mod algebra;
mod fp;
mod hom;
mod module;
mod order;
mod structure;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};

pub use algebra::FiniteAlgebra;
pub use fp::{fp_pushout, FpMap, FpModule};
pub use hom::{end_ring, hom_space, is_split_mono, pushout, HomSpace, ModMap};
pub use module::{right_solve, FModule};
pub use order::{
    annihilator_exponent, default_precision, exact_div, ext1, inverse_scaled, lattice_homs, lattice_iso,
    lattice_is_indecomposable, zp_kernel, LatticeHoms, LatticeModule, OrderDatum,
};
pub use structure::{composition_series, end_submodules, endolength, is_indecomposable, iso_test, IsoOutcome};

/// Default enumeration budget, in elements.
pub const DEFAULT_BUDGET: u128 = 1 << 20;

/// Enumeration limits and a cooperative cancellation flag for long searches.
#[derive(Clone, Debug)]
pub struct Budget {
    pub limit: u128,
    pub random_samples: usize,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { limit: DEFAULT_BUDGET, random_samples: 10_000, cancel: None }
    }
}

impl Budget {
    pub fn with_limit(limit: u128) -> Budget {
        Budget { limit, ..Budget::default() }
    }

    pub fn cancelled(&self) -> bool {
        self.cancel.as_ref().is_some_and(|c| c.load(Ordering::Relaxed))
    }

    pub fn check_cancel(&self) -> Result<()> {
        if self.cancelled() {
            Err(Error::Budget("search cancelled".into()))
        } else {
            Ok(())
        }
    }

    pub fn check_size(&self, p: u64, log: u32, what: &str) -> Result<()> {
        match (p as u128).checked_pow(log) {
            Some(n) if n <= self.limit => Ok(()),
            _ => Err(Error::Budget(format!("{what} has {p}^{log} elements"))),
        }
    }
}
