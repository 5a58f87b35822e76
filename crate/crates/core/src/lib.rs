pub mod algcore;
pub mod error;
pub mod exactlin;
pub mod fixtures;
pub mod interp;
pub mod latdim;
pub mod maranda;
pub mod par;
pub mod ppdsl;
pub mod rrfun;
pub mod zgtop;

pub use error::{Error, Result};
