//! Ball arithmetic and the special functions built on it.

pub mod complex;
pub mod consts;
pub mod decimal;
pub mod elementary;
pub mod gamma;
pub mod mag;
pub mod real;

pub use complex::MpComplex;
pub use consts::pi_const;
pub use decimal::decimal_digits;
pub use gamma::{gamma_ratio, log_gamma};
pub use mag::Mag;
pub use real::MpReal;
