//! Tunable defaults shared by all modules.
//!
//! Every output artifact (cache sidecar, CLI metadata) serializes the
//! effective [`LabConfig`] so a run can be reproduced from its outputs alone.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest precision accepted by the public multiprecision entry points.
pub const MIN_PRECISION: u32 = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabConfig {
    /// ζ(2m) for m up to this bound comes from the exact Bernoulli closed
    /// form; larger m use the Euler–Maclaurin Dirichlet oracle.
    pub zeta_exact_max_m: u64,
    /// Largest Bernoulli index served by the memoized recurrence.
    pub bernoulli_max_n: u64,
    /// Largest number of Euler–Maclaurin correction terms the oracle may use.
    pub zeta_em_max_terms: u64,
    /// Stirling's series is applied once Re(z) ≥ factor · working bits + 10.
    pub lgamma_raise_factor: f64,
    /// `pochhammer` uses the direct product up to this k and the Γ-ratio
    /// form above it.
    pub pochhammer_direct_max_k: u64,
    /// Guard bits added on top of `target + k + ⌈log2(k+1)⌉` by the
    /// binomial method.
    pub binomial_guard_bits: u32,
    /// Hard cap on any working precision.
    pub precision_cap_bits: u32,
    /// Möbius / Mertens / q_k sums use the hardware-float kernel (with a
    /// rigorous rounding bound) while N stays below this limit.
    pub hardware_kernel_max_n: u64,
}

impl Default for LabConfig {
    fn default() -> Self {
        LabConfig {
            zeta_exact_max_m: 64,
            bernoulli_max_n: 4096,
            zeta_em_max_terms: 120,
            lgamma_raise_factor: 0.3,
            pochhammer_direct_max_k: 512,
            binomial_guard_bits: 16,
            precision_cap_bits: 1 << 20,
            hardware_kernel_max_n: 1 << 26,
        }
    }
}

pub(crate) fn check_precision(prec: u32) -> Result<()> {
    if prec < MIN_PRECISION {
        return Err(Error::config(format!(
            "precision {prec} bits is below the minimum of {MIN_PRECISION}"
        )));
    }
    Ok(())
}

static ACTIVE: std::sync::OnceLock<LabConfig> = std::sync::OnceLock::new();

/// The configuration in effect for this process (defaults unless
/// [`install`] ran first).
pub fn active() -> &'static LabConfig {
    ACTIVE.get_or_init(LabConfig::default)
}

/// Installs `cfg` process-wide. Fails if a configuration is already in
/// effect and differs from `cfg`.
pub fn install(cfg: LabConfig) -> Result<()> {
    let current = ACTIVE.get_or_init(|| cfg.clone());
    if *current != cfg {
        return Err(Error::config("a different configuration is already active"));
    }
    Ok(())
}
