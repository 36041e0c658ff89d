//! ζ at even integers and a Dirichlet-series oracle.

pub mod bernoulli;
pub mod even;
pub mod oracle;

pub use bernoulli::{bernoulli, von_staudt_denominator, zeta_even_rational};
pub use even::{inv_zeta_even, prefetch_inv_zeta_even, zeta_even, ZetaEvenValue};
pub use oracle::{inv_zeta_oracle, zeta_dirichlet_oracle};
