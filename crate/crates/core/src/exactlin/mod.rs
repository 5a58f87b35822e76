//! Linear algebra over Z/p^N.

mod matrix;
mod ring;
mod snf;
mod subgroup;

pub use matrix::RMatrix;
pub use ring::{max_exponent, Ring};
pub use snf::{smith, Smith};
pub use subgroup::{image, kernel, preimage, solve, Subgroup};
