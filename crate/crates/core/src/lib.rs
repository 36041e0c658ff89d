//! Ball-arithmetic laboratory for the coefficients
//! `c_k = Σ_j (−1)^j C(k, j) / ζ(2j + 2)`.

pub mod analysis;
pub mod coefficients;
pub mod config;
pub mod error;
pub mod mobius;
pub mod mp;
pub mod pochhammer;
pub mod series;
pub mod verify;
pub mod zeta;

pub use error::{Error, Result};
